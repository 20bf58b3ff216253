#include "canreg/augmentation.hpp"

#include <algorithm>
#include <cmath>

#include "canreg/errors.hpp"

namespace canreg {

double DistortionTable::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

std::vector<Axis> source_axes(const std::vector<Alphabet>& x, const Alphabet& s, const Alphabet& v) {
  const std::size_t M = x.size();
  std::vector<Axis> axes;
  axes.reserve(M + 2);
  for (std::size_t k = 0; k < M; ++k) axes.push_back({axis_id::x(k), x[k]});
  axes.push_back({axis_id::s(M), s});
  axes.push_back({axis_id::v(M), v});
  return axes;
}

void ProblemSpec::validate() const {
  if (M == 0) throw StructuralError("problem: M must be at least 1");
  if (J > M) throw StructuralError("problem: J must not exceed M");
  if (x_alphabets.size() != M) throw StructuralError("problem: expected M source alphabets");
  if (vhat_alphabets.size() != L) throw StructuralError("problem: expected L reconstruction alphabets");
  if (distortions.size() != L) throw StructuralError("problem: expected L distortion tables");

  std::vector<std::string> labels;
  auto check_alphabet = [&](const Alphabet& a) {
    if (a.size == 0) throw StructuralError("problem: alphabet '" + a.label + "' is empty");
    if (std::find(labels.begin(), labels.end(), a.label) != labels.end()) {
      throw StructuralError("problem: duplicate alphabet label '" + a.label + "'");
    }
    labels.push_back(a.label);
  };
  for (const auto& a : x_alphabets) check_alphabet(a);
  check_alphabet(s_alphabet);
  check_alphabet(v_alphabet);
  for (const auto& a : vhat_alphabets) check_alphabet(a);

  if (source.axes() != source_axes(x_alphabets, s_alphabet, v_alphabet)) {
    throw StructuralError("problem: source axes do not match the declared alphabets");
  }
  for (std::size_t l = 0; l < L; ++l) {
    const auto& d = distortions[l];
    if (d.rows != v_alphabet.size || d.cols != vhat_alphabets[l].size || d.values.size() != d.rows * d.cols) {
      throw StructuralError("problem: distortion table " + std::to_string(l + 1) + " has the wrong shape");
    }
    for (double e : d.values) {
      if (!(e >= 0.0) || !std::isfinite(e)) {
        throw StructuralError("problem: distortion table " + std::to_string(l + 1) + " has a negative entry");
      }
    }
  }
}

std::vector<double> ProblemSpec::source_marginal(std::size_t k) const {
  if (k >= M) throw StructuralError("source_marginal: source index out of range");
  const VarSet groups[] = {VarSet::single(k)};
  return group_axes(source, groups).values;
}

std::vector<std::string> ProblemSpec::degeneracy_warnings() const {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < M; ++k) {
    auto p = source_marginal(k);
    for (std::size_t x = 0; x < p.size(); ++x) {
      if (p[x] == 0.0) {
        out.push_back("symbol " + std::to_string(x) + " of " + x_alphabets[k].label + " has zero probability");
      }
    }
  }
  return out;
}

Channel Channel::identity(std::size_t n) {
  Channel c{n, n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) c(i, i) = 1.0;
  return c;
}

Channel Channel::constant(std::size_t n) { return Channel{n, 1, std::vector<double>(n, 1.0)}; }

Channel Channel::random(std::size_t inputs, std::size_t outputs, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Channel c{inputs, outputs, std::vector<double>(inputs * outputs)};
  for (std::size_t x = 0; x < inputs; ++x) {
    double total = 0.0;
    for (std::size_t z = 0; z < outputs; ++z) total += (c(x, z) = expo(rng));
    for (std::size_t z = 0; z < outputs; ++z) c(x, z) /= total;
  }
  return c;
}

void Channel::validate() const {
  if (inputs == 0 || outputs == 0) throw StructuralError("channel: empty alphabet");
  if (rows.size() != inputs * outputs) throw StructuralError("channel: table has the wrong size");
  for (std::size_t x = 0; x < inputs; ++x) {
    double total = 0.0;
    for (std::size_t z = 0; z < outputs; ++z) {
      const double v = (*this)(x, z);
      if (!(v >= 0.0)) throw StructuralError("channel: negative entry");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw StructuralError("channel: row " + std::to_string(x) + " is not stochastic");
  }
}

ChannelSet identity_channels(const ProblemSpec& spec) {
  ChannelSet out;
  for (std::size_t k = spec.J; k < spec.M; ++k) out.push_back(Channel::identity(spec.x_alphabets[k].size));
  return out;
}

ChannelSet constant_channels(const ProblemSpec& spec) {
  ChannelSet out;
  for (std::size_t k = spec.J; k < spec.M; ++k) out.push_back(Channel::constant(spec.x_alphabets[k].size));
  return out;
}

ChannelSet random_channels(const ProblemSpec& spec, std::mt19937_64& rng) {
  std::vector<std::size_t> sizes;
  for (std::size_t k = spec.J; k < spec.M; ++k) sizes.push_back(spec.x_alphabets[k].size);
  return random_channels(spec, sizes, rng);
}

ChannelSet random_channels(const ProblemSpec& spec, const std::vector<std::size_t>& z_sizes, std::mt19937_64& rng) {
  if (z_sizes.size() != spec.M - spec.J) throw StructuralError("random_channels: need one output size per channel");
  ChannelSet out;
  for (std::size_t k = spec.J; k < spec.M; ++k) {
    out.push_back(Channel::random(spec.x_alphabets[k].size, z_sizes[k - spec.J], rng));
  }
  return out;
}

AugmentedPmf::AugmentedPmf(ProblemSpec spec, ChannelSet channels, JointPmf joint)
    : spec_(std::move(spec)), channels_(std::move(channels)), joint_(std::move(joint)) {}

VarSet AugmentedPmf::z(std::size_t k) const {
  if (k >= spec_.M) throw StructuralError("AugmentedPmf::z: source index out of range");
  if (k < spec_.J) return x(k);
  return VarSet::single(spec_.M + 2 + (k - spec_.J));
}

VarSet AugmentedPmf::z_set(VarSet sources) const {
  if (!sources.subset_of(all_sources())) throw StructuralError("AugmentedPmf::z_set: not a set of sources");
  VarSet out;
  for (auto k : sources.members()) out = out | z(k);
  return out;
}

AugmentedPmf attach_channels(const ProblemSpec& spec, const ChannelSet& channels) {
  if (channels.size() != spec.M - spec.J) {
    throw StructuralError("attach_channels: expected " + std::to_string(spec.M - spec.J) + " channels, got " +
                          std::to_string(channels.size()));
  }
  std::vector<Axis> axes = spec.source.axes();
  std::vector<double> probs = spec.source.probs();
  std::vector<std::size_t> shape;
  for (const auto& a : axes) shape.push_back(a.alphabet.size);

  for (std::size_t k = spec.J; k < spec.M; ++k) {
    const Channel& q = channels[k - spec.J];
    q.validate();
    if (q.inputs != spec.x_alphabets[k].size) {
      throw StructuralError("attach_channels: channel for source " + std::to_string(k + 1) +
                            " has input size " + std::to_string(q.inputs) + ", alphabet has " +
                            std::to_string(spec.x_alphabets[k].size));
    }
    // X_k stride in the current tensor; the new Z_k axis is appended last.
    std::size_t stride = 1;
    for (std::size_t a = shape.size(); a-- > k + 1;) stride *= shape[a];
    std::vector<double> next(probs.size() * q.outputs);
    for (std::size_t cell = 0; cell < probs.size(); ++cell) {
      const std::size_t x = (cell / stride) % shape[k];
      for (std::size_t z = 0; z < q.outputs; ++z) next[cell * q.outputs + z] = probs[cell] * q(x, z);
    }
    probs = std::move(next);
    axes.push_back({axis_id::z(spec.M, k), Alphabet{"Z" + std::to_string(k + 1), q.outputs}});
    shape.push_back(q.outputs);
  }
  JointPmf joint(std::move(axes), std::move(probs));
  return AugmentedPmf(spec, channels, std::move(joint));
}

double factorization_defect(const AugmentedPmf& aug) {
  const auto& spec = aug.spec();
  const VarSet everything = aug.joint().all();
  double worst = 0.0;
  for (std::size_t k = spec.J; k < spec.M; ++k) {
    const VarSet rest = everything - aug.z(k) - aug.x(k);
    if (rest.empty()) continue;
    worst = std::max(worst, cmi(aug.joint(), aug.z(k), rest, aug.x(k)));
  }
  return worst;
}

std::size_t ReverseChannelPair::support() const {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

double ReverseChannelPair::mixture_error(const std::vector<double>& marginal) const {
  double worst = 0.0;
  for (std::size_t x = 0; x < marginal.size(); ++x) {
    double mix = 0.0;
    for (std::size_t z = 0; z < weights.size(); ++z) mix += weights[z] * columns[z][x];
    worst = std::max(worst, std::abs(mix - marginal[x]));
  }
  return worst;
}

ReverseChannelPair forward_to_reverse(const ProblemSpec& spec, std::size_t k, const Channel& q) {
  if (k < spec.J || k >= spec.M) throw StructuralError("forward_to_reverse: k must index an auxiliary source");
  if (q.inputs != spec.x_alphabets[k].size) throw StructuralError("forward_to_reverse: channel input size mismatch");
  const auto p = spec.source_marginal(k);
  const std::size_t nx = q.inputs;
  ReverseChannelPair pair;
  pair.weights.assign(q.outputs, 0.0);
  pair.columns.assign(q.outputs, std::vector<double>(nx, 0.0));
  for (std::size_t z = 0; z < q.outputs; ++z) {
    double w = 0.0;
    for (std::size_t x = 0; x < nx; ++x) w += p[x] * q(x, z);
    pair.weights[z] = w;
    auto& col = pair.columns[z];
    if (w > 0.0) {
      for (std::size_t x = 0; x < nx; ++x) col[x] = p[x] * q(x, z) / w;
    } else {
      std::fill(col.begin(), col.end(), 1.0 / static_cast<double>(nx));
    }
  }
  return pair;
}

Channel reverse_to_forward(const ProblemSpec& spec, std::size_t k, const ReverseChannelPair& pair,
                           std::vector<std::string>* warnings) {
  if (k < spec.J || k >= spec.M) throw StructuralError("reverse_to_forward: k must index an auxiliary source");
  const auto p = spec.source_marginal(k);
  const std::size_t nx = p.size();
  if (pair.columns.size() != pair.weights.size()) throw StructuralError("reverse_to_forward: ragged pair");
  for (const auto& col : pair.columns) {
    if (col.size() != nx) throw StructuralError("reverse_to_forward: column length differs from |X_k|");
  }
  if (pair.mixture_error(p) > 1e-8) {
    throw PreconditionError("reverse_to_forward: pair violates the mixture identity");
  }

  std::vector<std::size_t> kept;
  for (std::size_t z = 0; z < pair.weights.size(); ++z) {
    if (pair.weights[z] > 0.0) kept.push_back(z);
  }
  if (kept.empty()) throw PreconditionError("reverse_to_forward: all weights are zero");

  Channel q{nx, kept.size(), std::vector<double>(nx * kept.size(), 0.0)};
  for (std::size_t x = 0; x < nx; ++x) {
    if (p[x] <= 0.0) {
      for (std::size_t j = 0; j < kept.size(); ++j) q(x, j) = 1.0 / static_cast<double>(kept.size());
      if (warnings != nullptr) {
        warnings->push_back("source " + std::to_string(k + 1) + " symbol " + std::to_string(x) +
                            " never occurs; its channel row is set uniform");
      }
      continue;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const auto z = kept[j];
      total += (q(x, j) = pair.weights[z] * pair.columns[z][x] / p[x]);
    }
    if (total <= 0.0) throw PreconditionError("reverse_to_forward: source symbol with positive mass is unreachable");
    for (std::size_t j = 0; j < kept.size(); ++j) q(x, j) /= total;
  }
  return q;
}

}  // namespace canreg
