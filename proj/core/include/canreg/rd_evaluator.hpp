#pragma once

#include <cstddef>
#include <vector>

#include "canreg/augmentation.hpp"
#include "canreg/rate_region.hpp"

namespace canreg {

/// A rate-distortion point (R_1..R_M, D_1..D_L).
struct RDPoint {
  RateVector rates;
  std::vector<double> distortions;
};

/// Evaluates the identity-permutation corner (R^0, D^0) of a channel set
/// without materializing the augmented joint: channels are contracted into
/// the source one at a time, and each rate is read off as an entropy
/// difference of the running marginal.
///
/// The incremental interface (Workspace / apply / finish) lets the
/// exhaustive oracle share the partial contractions of a channel prefix.
class RdEvaluator {
 public:
  explicit RdEvaluator(const ProblemSpec& spec);

  const ProblemSpec& spec() const { return spec_; }

  RDPoint evaluate(const ChannelSet& channels) const;
  double objective(const ChannelSet& channels, const class Direction& a) const;

  struct Workspace {
    std::vector<std::vector<double>> tensors;  // one per level J..M
    std::vector<double> prefix_entropy;        // H(X_{<J}, S, Z_{J..k-1}) per level
    RateVector rates;
  };
  Workspace workspace() const;

  /// H(Z_k | X_k) of a channel for source k.
  double channel_entropy(std::size_t k, const double* rows, std::size_t outputs) const;

  /// Contracts the channel for source k into level k of `ws` (levels below k
  /// must be current) and sets ws.rates[k].
  void apply(Workspace& ws, std::size_t k, const double* rows, std::size_t outputs, double channel_entropy) const;

  /// Minimum expected distortions from the final level; `out` has L entries.
  void finish(const Workspace& ws, double* out) const;

 private:
  ProblemSpec spec_;
  std::vector<double> source_;     // layout (X_{<J}, S, X_J..X_{M-1}, V)
  std::size_t lossless_block_ = 1; // |X_{<J}| * |S|
  std::vector<std::size_t> post_;  // post_[k]: prod_{i>k} |X_i| * |V|
  std::vector<std::vector<double>> marginals_;
  RateVector lossless_rates_;
  double base_entropy_ = 0.0;
};

}  // namespace canreg
