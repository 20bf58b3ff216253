#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "canreg/pmf.hpp"

namespace canreg {

// Axis ids used in every joint built from a ProblemSpec. Sources are
// 0-based: X_k has id k, S has id M, V has id M+1, and the auxiliary Z_k
// (k >= J) has id M+2+k.
namespace axis_id {
inline int x(std::size_t k) { return static_cast<int>(k); }
inline int s(std::size_t M) { return static_cast<int>(M); }
inline int v(std::size_t M) { return static_cast<int>(M + 1); }
inline int z(std::size_t M, std::size_t k) { return static_cast<int>(M + 2 + k); }
}  // namespace axis_id

/// Distortion measure d(v, vhat) as a dense |V| x |Vhat| table.
struct DistortionTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t v, std::size_t vhat) const { return values[v * cols + vhat]; }
  double max() const;

  bool operator==(const DistortionTable&) const = default;
};

/// A multiterminal source-coding instance: M sources of which the first J
/// are conveyed losslessly, decoder side information S, a target V and L
/// distortion measures. The source pmf has axes (X_1..X_M, S, V).
struct ProblemSpec {
  std::string name;
  std::string notes;
  std::size_t M = 0;
  std::size_t J = 0;
  std::size_t L = 0;
  std::vector<Alphabet> x_alphabets;
  Alphabet s_alphabet{"S", 1};
  Alphabet v_alphabet{"V", 1};
  std::vector<Alphabet> vhat_alphabets;
  JointPmf source;
  std::vector<DistortionTable> distortions;

  /// Checks every structural invariant; throws StructuralError.
  void validate() const;

  /// Marginal p_k of source k.
  std::vector<double> source_marginal(std::size_t k) const;

  /// Human-readable notes about symbols of zero probability.
  std::vector<std::string> degeneracy_warnings() const;

  bool operator==(const ProblemSpec&) const = default;
};

/// Builds the source JointPmf axes for the given alphabets.
std::vector<Axis> source_axes(const std::vector<Alphabet>& x, const Alphabet& s, const Alphabet& v);

/// Row-stochastic test channel q(z | x), stored row-major |X| x |Z|.
struct Channel {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> rows;

  double operator()(std::size_t x, std::size_t z) const { return rows[x * outputs + z]; }
  double& operator()(std::size_t x, std::size_t z) { return rows[x * outputs + z]; }

  static Channel identity(std::size_t n);
  /// Single output symbol: Z carries no information.
  static Channel constant(std::size_t n);
  /// Rows drawn from the flat Dirichlet distribution.
  static Channel random(std::size_t inputs, std::size_t outputs, std::mt19937_64& rng);

  /// Throws StructuralError unless every row is a probability vector (1e-12).
  void validate() const;

  bool operator==(const Channel&) const = default;
};

using ChannelSet = std::vector<Channel>;  // one per k = J..M-1

ChannelSet identity_channels(const ProblemSpec& spec);
ChannelSet constant_channels(const ProblemSpec& spec);
ChannelSet random_channels(const ProblemSpec& spec, std::mt19937_64& rng);
ChannelSet random_channels(const ProblemSpec& spec, const std::vector<std::size_t>& z_sizes, std::mt19937_64& rng);

/// The joint p(x, s, v) * prod_{k >= J} q_k(z_k | x_k). Z_m for m < J is
/// never materialized; z(m) resolves to the X_m axis instead.
class AugmentedPmf {
 public:
  AugmentedPmf(ProblemSpec spec, ChannelSet channels, JointPmf joint);

  const JointPmf& joint() const { return joint_; }
  const ProblemSpec& spec() const { return spec_; }
  const ChannelSet& channels() const { return channels_; }
  std::size_t sources() const { return spec_.M; }

  VarSet x(std::size_t k) const { return VarSet::single(k); }
  VarSet z(std::size_t k) const;
  VarSet s() const { return VarSet::single(spec_.M); }
  VarSet v() const { return VarSet::single(spec_.M + 1); }
  /// Union of X_k over the sources in `sources` (a mask over 0..M-1).
  VarSet x_set(VarSet sources) const { return sources; }
  VarSet z_set(VarSet sources) const;
  /// Mask of all sources 0..M-1.
  VarSet all_sources() const { return VarSet::range(0, spec_.M); }

 private:
  ProblemSpec spec_;
  ChannelSet channels_;
  JointPmf joint_;
};

AugmentedPmf attach_channels(const ProblemSpec& spec, const ChannelSet& channels);

/// max over k >= J of I(Z_k; everything else | X_k). Zero up to rounding for
/// every joint built by attach_channels.
double factorization_defect(const AugmentedPmf& aug);

/// Mixture weights p'(z) plus posterior columns q'(. | z) over X_k.
struct ReverseChannelPair {
  std::vector<double> weights;
  std::vector<std::vector<double>> columns;

  std::size_t support() const;
  /// max_x |sum_z p'(z) q'(x|z) - p_k(x)|.
  double mixture_error(const std::vector<double>& marginal) const;
};

/// Bayes inversion p_k(x) q(z|x) = p'(z) q'(x|z). Output symbols of zero
/// weight get a uniform column.
ReverseChannelPair forward_to_reverse(const ProblemSpec& spec, std::size_t k, const Channel& q);

/// q(z|x) = p'(z) q'(x|z) / p_k(x). Zero-weight symbols are dropped. Rows for
/// source symbols of zero probability are undefined; they are set uniform and
/// a warning is appended to `warnings` when given.
Channel reverse_to_forward(const ProblemSpec& spec, std::size_t k, const ReverseChannelPair& pair,
                           std::vector<std::string>* warnings = nullptr);

}  // namespace canreg
