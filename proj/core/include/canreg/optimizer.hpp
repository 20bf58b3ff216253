#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "canreg/augmentation.hpp"
#include "canreg/direction.hpp"
#include "canreg/functionals.hpp"
#include "canreg/rate_region.hpp"
#include "canreg/rd_evaluator.hpp"

namespace canreg {

/// Leaf evaluations the exhaustive oracle agrees to run before refusing.
inline constexpr double kOracleBudget = 1e8;

struct OptimizeOptions {
  std::size_t sweeps = 50;
  std::size_t candidates = 64;
  std::size_t restarts = 8;
  double stop_improvement = 1e-9;
};

/// sum_{i>=J} a_i R_i + sum_l a_{M+l} D_l on the augmented joint, using the
/// identity-permutation corner.
double weighted_objective(const ProblemSpec& spec, const ChannelSet& channels, const Direction& a);

/// Points of the simplex over X_k tried by optimize_single_channel: vertices,
/// pairwise midpoints, the barycenter, p_k itself, `random_draws` flat
/// Dirichlet draws and the incumbent's posterior columns.
std::vector<std::vector<double>> candidate_pool(const FunctionalContext& ctx, std::size_t random_draws,
                                                std::uint64_t seed);

struct SingleChannelResult {
  ReverseChannelPair pair;
  double objective = 0.0;  // sum_z p'(z) Theta(q'(.|z))
  std::size_t pool_size = 0;
};

/// Replaces channel k by the best mixture of pool points: a basic optimal
/// solution of min sum_j w_j Theta(t_j) s.t. sum_j w_j t_j = p_k, w >= 0, so
/// the support never exceeds |X_k|. The context must carry a direction.
SingleChannelResult optimize_single_channel(const FunctionalContext& ctx, std::size_t candidates, std::uint64_t seed);

struct OptimizeResult {
  ChannelSet channels;
  double objective = 0.0;
  RDPoint rd_point;
  std::vector<double> trace;  // initial objective, then one value per sweep
  std::vector<double> steps;  // objective after every single-channel update
  std::size_t sweeps_run = 0;
};

/// Cycles k = J..M-1, replacing each channel by its single-channel optimum
/// when that does not increase the objective.
OptimizeResult coordinate_descent(const ProblemSpec& spec, const Direction& a, const ChannelSet& init,
                                  const OptimizeOptions& options, std::uint64_t seed);

/// Initial channel sets used by multi_start: identity, constant, then
/// random with |Z_k| = |X_k|, `restarts` in total.
std::vector<ChannelSet> restart_inits(const ProblemSpec& spec, std::size_t restarts, std::uint64_t seed);

/// Best coordinate_descent result over restart_inits plus `extra` inits;
/// ties keep the earliest run.
OptimizeResult multi_start(const ProblemSpec& spec, const Direction& a, const OptimizeOptions& options,
                           std::uint64_t seed, const std::vector<ChannelSet>& extra = {});

/// All |X| x |Z| channels with rows on the lattice {n / grid}, one per
/// relabeling class of Z (columns in non-increasing lexicographic order).
std::vector<Channel> lattice_channels(std::size_t inputs, std::size_t outputs, std::size_t grid);

/// Rough leaf count of an oracle run, before the lattice is generated.
double oracle_cost(const ProblemSpec& spec, const std::vector<std::size_t>& z_sizes, std::size_t grid);

struct OracleResult {
  double objective = 0.0;
  ChannelSet channels;
};

struct OracleRun {
  std::vector<OracleResult> best;  // one per direction
  double evaluations = 0.0;
};

/// Exhaustive minimum over lattice channels with |Z_k| = z_sizes[k - J], for
/// several directions at once. Throws BudgetError when the leaf count exceeds
/// `budget`. The result does not depend on `threads`.
OracleRun brute_force_oracle(const ProblemSpec& spec, std::span<const Direction> directions,
                             const std::vector<std::size_t>& z_sizes, std::size_t grid,
                             double budget = kOracleBudget, std::size_t threads = 0);

OracleResult brute_force_oracle(const ProblemSpec& spec, const Direction& a, const std::vector<std::size_t>& z_sizes,
                                std::size_t grid, double budget = kOracleBudget);

struct AlphabetBoundReport {
  double capped_min = 0.0;    // |Z_k| = |X_k|: best of lattice and descent
  double capped_oracle = 0.0; // lattice part alone
  double enlarged_min = 0.0;  // |Z_k| = |X_k| + 2
  std::size_t capped_grid = 0;
  std::size_t enlarged_grid = 0;
  double evaluations = 0.0;
  ChannelSet capped_channels;
  ChannelSet enlarged_channels;
  bool passed = false;
};

/// Capped side: oracle at grid 2*grid (fewer free entries, so a finer
/// lattice costs about the same) refined by multi_start seeded with the
/// oracle argmin. Enlarged side: oracle at `grid`. PASS iff
/// capped_min <= enlarged_min + tol.
std::vector<AlphabetBoundReport> verify_alphabet_bound(const ProblemSpec& spec, std::span<const Direction> directions,
                                                       std::size_t grid, double tol, const OptimizeOptions& options,
                                                       std::uint64_t seed, double budget = kOracleBudget);

AlphabetBoundReport verify_alphabet_bound(const ProblemSpec& spec, const Direction& a, std::size_t grid, double tol,
                                          const OptimizeOptions& options = {}, std::uint64_t seed = 42,
                                          double budget = kOracleBudget);

struct TracePoint {
  Direction direction;
  OptimizeResult result;
  RDPoint corner;  // rates from the permutation formula, D unchanged
};

/// Multi-start optimum for each direction plus its corner under `perm`.
std::vector<TracePoint> trace_inner_bound(const ProblemSpec& spec, std::span<const Direction> directions,
                                          const Permutation& perm, const OptimizeOptions& options,
                                          std::uint64_t seed);

}  // namespace canreg
