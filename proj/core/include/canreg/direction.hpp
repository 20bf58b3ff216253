#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "canreg/augmentation.hpp"

namespace canreg {

/// Nonnegative unit normal of a supporting hyperplane in (R_1..R_M, D_1..D_L)
/// space. Entries for the lossless sources are zero.
class Direction {
 public:
  /// Checks admissibility: size M+L, entries >= 0, a_0..a_{J-1} = 0, unit
  /// Euclidean norm within 1e-12. Throws StructuralError.
  Direction(const ProblemSpec& spec, std::vector<double> weights);

  /// Scales a nonnegative, not-all-zero vector to unit norm first.
  static Direction normalized(const ProblemSpec& spec, std::vector<double> raw);

  /// Uniform on the admissible part of the unit sphere.
  static Direction random(const ProblemSpec& spec, std::mt19937_64& rng);

  const std::vector<double>& weights() const { return weights_; }
  double rate_weight(std::size_t i) const { return weights_[i]; }
  double distortion_weight(std::size_t l) const { return weights_[sources_ + l]; }
  std::size_t sources() const { return sources_; }
  std::size_t distortions() const { return weights_.size() - sources_; }

  double dot(const std::vector<double>& rates, const std::vector<double>& distortions) const;

  std::string to_string() const;

 private:
  std::size_t sources_ = 0;
  std::vector<double> weights_;
};

}  // namespace canreg
