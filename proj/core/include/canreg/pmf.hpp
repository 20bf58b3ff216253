#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace canreg {

/// Total mass of every JointPmf must be within this of 1.
inline constexpr double kMassTolerance = 1e-12;

/// Negative conditional mutual information down to -kCmiClamp is rounding
/// noise and is clamped to zero; anything below raises NumericError.
inline constexpr double kCmiClamp = 1e-10;

struct Alphabet {
  std::string label;
  std::size_t size = 1;

  bool operator==(const Alphabet&) const = default;
};

/// Bitmask over the axis positions of a JointPmf.
class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr VarSet single(std::size_t axis) { return VarSet(std::uint64_t{1} << axis); }
  static VarSet of(std::initializer_list<std::size_t> axes);
  /// Positions [first, last).
  static VarSet range(std::size_t first, std::size_t last);

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(std::size_t axis) const { return (bits_ >> axis) & 1U; }
  constexpr bool disjoint(VarSet other) const { return (bits_ & other.bits_) == 0; }
  constexpr bool subset_of(VarSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool proper_subset_of(VarSet other) const { return subset_of(other) && bits_ != other.bits_; }

  constexpr VarSet operator|(VarSet o) const { return VarSet(bits_ | o.bits_); }
  constexpr VarSet operator&(VarSet o) const { return VarSet(bits_ & o.bits_); }
  /// Set difference.
  constexpr VarSet operator-(VarSet o) const { return VarSet(bits_ & ~o.bits_); }
  constexpr bool operator==(const VarSet&) const = default;

  /// Member positions in increasing order.
  std::vector<std::size_t> members() const;
  std::string to_string() const;

 private:
  std::uint64_t bits_ = 0;
};

struct Axis {
  int id = 0;
  Alphabet alphabet;

  bool operator==(const Axis&) const = default;
};

/// Dense probability tensor over an ordered list of finite axes, row-major
/// with the last axis fastest.
class JointPmf {
 public:
  /// Rank-0 point mass.
  JointPmf();
  /// Validates nonnegativity, shape and total mass (kMassTolerance).
  JointPmf(std::vector<Axis> axes, std::vector<double> probs);

  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t rank() const { return axes_.size(); }
  std::size_t size() const { return probs_.size(); }
  std::size_t extent(std::size_t pos) const { return axes_[pos].alphabet.size; }
  std::size_t stride(std::size_t pos) const { return strides_[pos]; }
  const std::vector<double>& probs() const { return probs_; }
  VarSet all() const { return VarSet::range(0, rank()); }

  /// Position of the axis with the given id; StructuralError if absent.
  std::size_t position_of(int id) const;
  VarSet set_of(std::initializer_list<int> ids) const;

  double at(std::span<const std::size_t> index) const;
  /// Index of the symbol on axis `pos` in flat cell `cell`.
  std::size_t coordinate(std::size_t cell, std::size_t pos) const {
    return (cell / strides_[pos]) % axes_[pos].alphabet.size;
  }

  bool operator==(const JointPmf&) const = default;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
};

/// Sums out every axis not in `keep`; kept axes retain their relative order.
JointPmf marginalize(const JointPmf& p, VarSet keep);

/// Regroups the tensor into a dense block indexed by one composite index per
/// group (group 0 slowest). Each group's composite index is row-major over its
/// axes in axis order. Axes in no group are summed out.
struct GroupedTable {
  std::vector<std::size_t> group_sizes;
  std::vector<double> values;
};
GroupedTable group_axes(const JointPmf& p, std::span<const VarSet> groups);

/// Shannon entropy (bits) of the marginal on `vars`; 0 for the empty set.
double joint_entropy(const JointPmf& p, VarSet vars);

/// H(of | given) in bits.
double entropy(const JointPmf& p, VarSet of, VarSet given = {});

/// I(a; b | given) in bits, clamped at zero.
double cmi(const JointPmf& p, VarSet a, VarSet b, VarSet given = {});

/// True iff I(a; b | mid) <= tol.
bool is_markov(const JointPmf& p, VarSet a, VarSet mid, VarSet b, double tol);

/// -sum t log2 t over positive entries.
double shannon_entropy(std::span<const double> dist);

}  // namespace canreg
