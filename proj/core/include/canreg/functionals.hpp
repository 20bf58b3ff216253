#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "canreg/augmentation.hpp"
#include "canreg/direction.hpp"

namespace canreg {

/// Optimal reconstruction map for one distortion measure: a symbol of the
/// reconstruction alphabet for every conditioning tuple u. Tuples are indexed
/// row-major over (X_1..X_J, S, Z_{J+1}..Z_M), i.e. in axis order of the
/// augmented joint.
struct Estimator {
  std::vector<std::size_t> tuple_shape;
  std::vector<std::size_t> choice;

  std::size_t operator()(std::size_t tuple) const { return choice[tuple]; }
};

struct DistortionComponent {
  double value = 0.0;  // in the measure's own units
  Estimator estimator;
};

/// Minimum expected distortion over estimators of V from
/// (X_1..X_J, Z_{J+1}..Z_M, S); ties go to the lowest reconstruction symbol.
DistortionComponent distortion_component(const AugmentedPmf& aug, std::size_t l);

/// Expected distortion of an arbitrary estimator table.
double expected_distortion(const AugmentedPmf& aug, std::size_t l, const Estimator& estimator);

/// Immutable snapshot of every channel except the one for source k, with the
/// conditional tables r(. | x_k) the rate and distortion functionals need.
/// Evaluating a functional at a point t of the simplex over X_k gives the
/// per-column contribution; the p'_k-weighted sum over the columns of any
/// admissible reverse pair reproduces the corresponding rate or distortion.
class FunctionalContext {
 public:
  /// `channels` holds one channel per k = J..M-1; the entry for k is kept
  /// as the incumbent but does not enter any table.
  FunctionalContext(const ProblemSpec& spec, std::size_t k, const ChannelSet& channels,
                    std::optional<Direction> direction = std::nullopt);

  const ProblemSpec& spec() const { return spec_; }
  std::size_t k() const { return k_; }
  const ChannelSet& channels() const { return channels_; }
  const Channel& incumbent() const { return channels_[k_ - spec_.J]; }
  const std::vector<double>& source_marginal() const { return marginal_; }
  const std::optional<Direction>& direction() const { return direction_; }

  /// H(X_i | X_{<J}, Z_{J..i-1}, S) contribution; constant in t when i = k.
  double phi_first(std::size_t i, std::span<const double> t) const;
  /// H(X_i | X_{<J}, Z_{J..i}, S) contribution.
  double phi_second(std::size_t i, std::span<const double> t) const;
  /// Rate R_i contribution for k <= i < M.
  double phi(std::size_t i, std::span<const double> t) const;
  /// Distortion D_l contribution.
  double psi(std::size_t l, std::span<const double> t) const;
  /// R_i for J <= i < k; these do not depend on channel k.
  double frozen_rate(std::size_t i) const;
  /// sum_i a_i Phi_ki(t) + sum_l a_{M+l} Psi_kl(t), with frozen rates for i < k.
  double theta(std::span<const double> t) const;

 private:
  // r(y, u | x) laid out [x][y][u] plus r(u | x) laid out [x][u].
  struct RateTable {
    std::size_t targets = 0;
    std::size_t tuples = 0;
    std::vector<double> joint;
    std::vector<double> conditioning;
  };
  // r(u, v | x) laid out [x][u][v].
  struct DistortionTableView {
    std::size_t tuples = 0;
    std::vector<double> joint;
  };

  double evaluate_rate_table(const RateTable& table, std::span<const double> t) const;
  void check_point(std::span<const double> t) const;

  ProblemSpec spec_;
  std::size_t k_;
  ChannelSet channels_;
  std::optional<Direction> direction_;
  std::vector<double> marginal_;
  double own_entropy_ = 0.0;                 // first term for i = k
  std::vector<RateTable> first_;             // index i - k, entry 0 unused
  std::vector<RateTable> second_;            // index i - k
  std::vector<double> frozen_rates_;         // index i - J, valid for i < k
  std::vector<DistortionTableView> distortion_;
};

double phi(const FunctionalContext& ctx, std::size_t i, std::span<const double> t);
double psi(const FunctionalContext& ctx, std::size_t l, std::span<const double> t);
double theta(const FunctionalContext& ctx, std::span<const double> t);

/// Direct objective sum_{i>=J} a_i R_i + sum_l a_{M+l} D_l evaluated on the
/// augmented joint (identity-permutation corner).
double direct_objective(const AugmentedPmf& aug, const Direction& a);

struct DecompositionEntry {
  std::size_t k = 0;
  double functional_path = 0.0;
  double direct_path = 0.0;
  double gap = 0.0;
};

struct DecompositionReport {
  std::vector<DecompositionEntry> entries;
  double max_gap = 0.0;
  bool passed = true;
};

/// For every k: sum_z p'_k(z) Theta(q'_k(.|z)) against the direct objective.
DecompositionReport verify_linear_decomposition(const ProblemSpec& spec, const ChannelSet& channels,
                                                const Direction& a, double tol);

}  // namespace canreg
