#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "canreg/augmentation.hpp"

namespace canreg {

/// Bits per source symbol, one entry per source.
using RateVector = std::vector<double>;

/// Active-constraint tolerance (bits).
inline constexpr double kActiveTolerance = 1e-9;
/// Conditional mutual informations below this count as an extraneous Markov
/// chain in the nondegeneracy preflight.
inline constexpr double kNondegeneracyThreshold = 1e-7;
/// Largest M for which all M! corners are enumerated.
inline constexpr std::size_t kMaxEnumerationSources = 6;

/// Bijection on the sources; order()[i] is the source placed at position i.
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> order);
  static Permutation identity(std::size_t n);

  std::size_t size() const { return order_.size(); }
  std::size_t operator[](std::size_t i) const { return order_[i]; }
  const std::vector<std::size_t>& order() const { return order_; }
  /// Sources at positions [first, size()).
  VarSet suffix(std::size_t first) const;
  /// Sources at positions [0, last).
  VarSet prefix(std::size_t last) const;
  std::string to_string() const;  // 1-based, e.g. "(2 1 3)"

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::size_t> order_;
};

/// I(X_I; Z_I | Z_C, S) for disjoint source sets I (nonempty) and C.
double rate_term(const AugmentedPmf& aug, VarSet sources, VarSet conditioning);

/// I(X_I; Z_I | Z_{I^c}, S): the left-hand side of the rate constraint for I.
double rate_lhs(const AugmentedPmf& aug, VarSet sources);

/// I(Z_A; Z_B | Z_C, S) for pairwise disjoint source sets.
double auxiliary_dependence(const AugmentedPmf& aug, VarSet a, VarSet b, VarSet conditioning);

struct ConstraintEntry {
  VarSet subset;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool active = false;
};

struct ConstraintReport {
  std::vector<ConstraintEntry> entries;  // bitmask order, 2^M - 1 entries
  bool member = false;

  std::vector<VarSet> active_family() const;
  std::size_t active_count() const;
  double worst_slack() const;
};

ConstraintReport membership(const AugmentedPmf& aug, const RateVector& rates, double tol = kActiveTolerance);

/// R_{perm(i)} = I(X_{perm(i)}; Z_{perm(i)} | Z_{perm(0..i-1)}, S).
RateVector corner_point(const AugmentedPmf& aug, const Permutation& perm);

struct ExtremePoint {
  Permutation perm;
  RateVector rates;
};

struct NondegeneracyReport {
  bool passed = true;
  double smallest = 0.0;       // smallest dependence found
  VarSet worst_a, worst_b;     // the pair achieving it
  std::vector<std::string> warnings;
};

/// Checks I(Z_A; Z_B | Z_rest, S) >= threshold for every pair of disjoint
/// nonempty source sets A, B, with rest the remaining sources.
NondegeneracyReport nondegeneracy_preflight(const AugmentedPmf& aug, double threshold = kNondegeneracyThreshold);

struct ExtremePointSet {
  std::vector<ExtremePoint> points;  // lexicographic permutation order
  std::size_t distinct = 0;
  double min_pairwise_gap = 0.0;     // smallest L-infinity distance between points
  NondegeneracyReport preflight;
};

/// All M! permutation corners. Refuses (StructuralError) for M > 6.
ExtremePointSet enumerate_extreme_points(const AugmentedPmf& aug, double tol = kActiveTolerance);

/// A random member of the region: a convex combination of up to three
/// corners, shifted into the positive orthant on a random subset of
/// coordinates half of the time.
RateVector sample_region_point(const ExtremePointSet& corners, std::mt19937_64& rng);

/// True iff the family is totally ordered by inclusion.
bool is_chain(const std::vector<VarSet>& family);

/// Requires a member of the rate region (PreconditionError otherwise); true
/// iff the active constraint family is a chain under inclusion.
bool verify_noncrossing(const AugmentedPmf& aug, const RateVector& rates, double tol = kActiveTolerance);

/// The chain-rule identities and the conditioning inequality relating the
/// rate terms, checked on random subset draws.
enum class ChainIdentity {
  ConditioningSplit,     // I(X_I;Z_I|Z_{(I+I')^c},S) = I(X_I;Z_I|Z_{I^c},S) + I(Z_I;Z_I'|Z_{(I+I')^c},S)
  DisjointUnion,         // I(X_{I+I'};Z_{I+I'}|Z_{(I+I')^c},S) = I(X_I;Z_I|Z_{(I+I')^c},S) + I(X_I';Z_I'|Z_{I'^c},S)
  RestrictedUnion,       // the same with {1..M} replaced by a superset H of I+I'
  ElementwiseExpansion,  // I(X_I;Z_I|Z_{I^c},S) = sum_j I(X_{i_j};Z_{i_j}|Z_{[M] - {i_j..i_m}},S)
  PrefixChain,           // I(X_{1..m};Z_{1..m}|S) = sum_{i<=m} I(X_i;Z_i|Z_{1..i-1},S)
  SuffixChain,           // I(X_{m+1..M};Z_{m+1..M}|Z_{1..m},S) = sum_{i>m} I(X_i;Z_i|Z_{1..i-1},S)
  ConditioningBound,     // I(X_I;Z_I|Z_{I^c},S) <= sum_{i in I} I(X_i;Z_i|Z_{1..i-1},S)
};

std::string to_string(ChainIdentity id);

struct ChainViolation {
  ChainIdentity identity;
  VarSet first, second;  // the sampled sets (second may be empty)
  std::vector<std::size_t> order;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ChainIdentityReport {
  std::size_t draws = 0;
  std::size_t checks = 0;
  double max_equality_gap = 0.0;
  double min_inequality_slack = 0.0;
  std::vector<ChainViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Random disjoint I, I' and random source orderings; every applicable
/// identity is checked per draw.
ChainIdentityReport verify_chain_identities(const AugmentedPmf& aug, std::size_t trials, double tol,
                                            std::uint64_t seed = 42);

}  // namespace canreg
