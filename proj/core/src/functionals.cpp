#include "canreg/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "canreg/errors.hpp"
#include "canreg/rate_region.hpp"

namespace canreg {

namespace {

// Conditioning tuple (X_{<J}, S, Z_j for j in `coded`) of an augmented joint.
VarSet conditioning_tuple(const AugmentedPmf& aug, VarSet coded) {
  return aug.x_set(VarSet::range(0, aug.spec().J)) | aug.s() | aug.z_set(coded);
}

}  // namespace

DistortionComponent distortion_component(const AugmentedPmf& aug, std::size_t l) {
  const auto& spec = aug.spec();
  if (l >= spec.L) throw StructuralError("distortion_component: measure index out of range");
  const auto& d = spec.distortions[l];
  const VarSet u = conditioning_tuple(aug, VarSet::range(spec.J, spec.M));
  const VarSet groups[] = {u, aug.v()};
  const auto table = group_axes(aug.joint(), groups);
  const std::size_t tuples = table.group_sizes[0];
  const std::size_t nv = table.group_sizes[1];

  DistortionComponent out;
  for (auto pos : u.members()) out.estimator.tuple_shape.push_back(aug.joint().extent(pos));
  out.estimator.choice.assign(tuples, 0);
  for (std::size_t t = 0; t < tuples; ++t) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t vhat = 0; vhat < d.cols; ++vhat) {
      double cost = 0.0;
      for (std::size_t v = 0; v < nv; ++v) cost += table.values[t * nv + v] * d(v, vhat);
      if (cost < best) {
        best = cost;
        out.estimator.choice[t] = vhat;
      }
    }
    out.value += best;
  }
  return out;
}

double expected_distortion(const AugmentedPmf& aug, std::size_t l, const Estimator& estimator) {
  const auto& spec = aug.spec();
  if (l >= spec.L) throw StructuralError("expected_distortion: measure index out of range");
  const auto& d = spec.distortions[l];
  const VarSet u = conditioning_tuple(aug, VarSet::range(spec.J, spec.M));
  const VarSet groups[] = {u, aug.v()};
  const auto table = group_axes(aug.joint(), groups);
  const std::size_t tuples = table.group_sizes[0];
  const std::size_t nv = table.group_sizes[1];
  if (estimator.choice.size() != tuples) throw StructuralError("expected_distortion: estimator table has the wrong size");
  double total = 0.0;
  for (std::size_t t = 0; t < tuples; ++t) {
    if (estimator.choice[t] >= d.cols) throw StructuralError("expected_distortion: reconstruction symbol out of range");
    for (std::size_t v = 0; v < nv; ++v) total += table.values[t * nv + v] * d(v, estimator.choice[t]);
  }
  return total;
}

FunctionalContext::FunctionalContext(const ProblemSpec& spec, std::size_t k, const ChannelSet& channels,
                                     std::optional<Direction> direction)
    : spec_(spec), k_(k), channels_(channels), direction_(std::move(direction)) {
  if (k < spec.J || k >= spec.M) throw StructuralError("FunctionalContext: k must index an auxiliary source");
  if (channels.size() != spec.M - spec.J) throw StructuralError("FunctionalContext: expected one channel per k >= J");
  if (direction_ && (direction_->sources() != spec.M || direction_->distortions() != spec.L)) {
    throw StructuralError("FunctionalContext: direction dimension mismatch");
  }
  marginal_ = spec.source_marginal(k);
  const std::size_t nx = marginal_.size();

  // Channel k is replaced by a one-symbol output so that Z_k drops out of
  // every table while axis positions stay fixed.
  ChannelSet frozen = channels;
  frozen[k - spec.J] = Channel::constant(nx);
  const auto base = attach_channels(spec, frozen);
  const auto& joint = base.joint();

  auto coded_below = [&](std::size_t i) { return VarSet::range(spec.J, i) - VarSet::single(k); };
  auto normalize_rows = [&](std::vector<double>& values, std::size_t row) {
    for (std::size_t x = 0; x < nx; ++x) {
      const double px = marginal_[x];
      for (std::size_t j = 0; j < row; ++j) values[x * row + j] = px > 0.0 ? values[x * row + j] / px : 0.0;
    }
  };
  auto build = [&](std::size_t target, VarSet u) {
    RateTable table;
    if (target == k) {
      const VarSet groups[] = {base.x(k), u};
      auto g = group_axes(joint, groups);
      table.targets = nx;
      table.tuples = g.group_sizes[1];
      normalize_rows(g.values, table.tuples);
      table.conditioning = g.values;
      table.joint.assign(nx * nx * table.tuples, 0.0);
      for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t t = 0; t < table.tuples; ++t) {
          table.joint[(x * nx + x) * table.tuples + t] = g.values[x * table.tuples + t];
        }
      }
      return table;
    }
    const VarSet groups[] = {base.x(k), base.x(target), u};
    auto g = group_axes(joint, groups);
    table.targets = g.group_sizes[1];
    table.tuples = g.group_sizes[2];
    normalize_rows(g.values, table.targets * table.tuples);
    table.joint = std::move(g.values);
    table.conditioning.assign(nx * table.tuples, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < table.targets; ++y) {
        for (std::size_t t = 0; t < table.tuples; ++t) {
          table.conditioning[x * table.tuples + t] += table.joint[(x * table.targets + y) * table.tuples + t];
        }
      }
    }
    return table;
  };

  own_entropy_ = std::max(0.0, entropy(joint, base.x(k), conditioning_tuple(base, coded_below(k))));
  first_.resize(spec.M - k);
  second_.resize(spec.M - k);
  for (std::size_t i = k; i < spec.M; ++i) {
    if (i > k) first_[i - k] = build(i, conditioning_tuple(base, coded_below(i)));
    second_[i - k] = build(i, conditioning_tuple(base, coded_below(i + 1)));
  }
  for (std::size_t i = spec.J; i < k; ++i) {
    frozen_rates_.push_back(rate_term(base, VarSet::single(i), VarSet::range(0, i)));
  }
  const VarSet others = conditioning_tuple(base, VarSet::range(spec.J, spec.M) - VarSet::single(k));
  for (std::size_t l = 0; l < spec.L; ++l) {
    const VarSet groups[] = {base.x(k), others, base.v()};
    auto g = group_axes(joint, groups);
    DistortionTableView view;
    view.tuples = g.group_sizes[1];
    normalize_rows(g.values, view.tuples * g.group_sizes[2]);
    view.joint = std::move(g.values);
    distortion_.push_back(std::move(view));
  }
}

void FunctionalContext::check_point(std::span<const double> t) const {
  if (t.size() != marginal_.size()) throw StructuralError("functional: point is not on the simplex over X_k");
  double total = 0.0;
  for (double v : t) {
    if (!(v >= 0.0)) throw StructuralError("functional: point has a negative coordinate");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw StructuralError("functional: point does not sum to one");
}

double FunctionalContext::evaluate_rate_table(const RateTable& table, std::span<const double> t) const {
  const std::size_t nx = marginal_.size();
  double value = 0.0;
  for (std::size_t u = 0; u < table.tuples; ++u) {
    double den = 0.0;
    for (std::size_t x = 0; x < nx; ++x) den += t[x] * table.conditioning[x * table.tuples + u];
    if (den <= 0.0) continue;
    for (std::size_t y = 0; y < table.targets; ++y) {
      double num = 0.0;
      for (std::size_t x = 0; x < nx; ++x) num += t[x] * table.joint[(x * table.targets + y) * table.tuples + u];
      if (num > 0.0) value -= num * std::log2(num / den);
    }
  }
  return value;
}

double FunctionalContext::phi_first(std::size_t i, std::span<const double> t) const {
  if (i < k_ || i >= spec_.M) throw StructuralError("phi: requires k <= i < M");
  check_point(t);
  return i == k_ ? own_entropy_ : evaluate_rate_table(first_[i - k_], t);
}

double FunctionalContext::phi_second(std::size_t i, std::span<const double> t) const {
  if (i < k_ || i >= spec_.M) throw StructuralError("phi: requires k <= i < M");
  check_point(t);
  return evaluate_rate_table(second_[i - k_], t);
}

double FunctionalContext::phi(std::size_t i, std::span<const double> t) const {
  return phi_first(i, t) - phi_second(i, t);
}

double FunctionalContext::psi(std::size_t l, std::span<const double> t) const {
  if (l >= spec_.L) throw StructuralError("psi: measure index out of range");
  check_point(t);
  const auto& view = distortion_[l];
  const auto& d = spec_.distortions[l];
  const std::size_t nx = marginal_.size();
  const std::size_t nv = d.rows;
  std::vector<double> mass(nv);
  double value = 0.0;
  for (std::size_t u = 0; u < view.tuples; ++u) {
    for (std::size_t v = 0; v < nv; ++v) {
      double m = 0.0;
      for (std::size_t x = 0; x < nx; ++x) m += t[x] * view.joint[(x * view.tuples + u) * nv + v];
      mass[v] = m;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t vhat = 0; vhat < d.cols; ++vhat) {
      double cost = 0.0;
      for (std::size_t v = 0; v < nv; ++v) cost += mass[v] * d(v, vhat);
      best = std::min(best, cost);
    }
    value += best;
  }
  return value;
}

double FunctionalContext::frozen_rate(std::size_t i) const {
  if (i < spec_.J || i >= k_) throw StructuralError("frozen_rate: requires J <= i < k");
  return frozen_rates_[i - spec_.J];
}

double FunctionalContext::theta(std::span<const double> t) const {
  if (!direction_) throw StructuralError("theta: context has no direction");
  const auto& a = *direction_;
  double value = 0.0;
  for (std::size_t i = spec_.J; i < spec_.M; ++i) {
    const double w = a.rate_weight(i);
    if (w == 0.0) continue;
    value += w * (i < k_ ? frozen_rate(i) : phi(i, t));
  }
  for (std::size_t l = 0; l < spec_.L; ++l) {
    const double w = a.distortion_weight(l);
    if (w == 0.0) continue;
    value += w * psi(l, t);
  }
  return value;
}

double phi(const FunctionalContext& ctx, std::size_t i, std::span<const double> t) { return ctx.phi(i, t); }
double psi(const FunctionalContext& ctx, std::size_t l, std::span<const double> t) { return ctx.psi(l, t); }
double theta(const FunctionalContext& ctx, std::span<const double> t) { return ctx.theta(t); }

double direct_objective(const AugmentedPmf& aug, const Direction& a) {
  const auto& spec = aug.spec();
  const auto rates = corner_point(aug, Permutation::identity(spec.M));
  double value = 0.0;
  for (std::size_t i = spec.J; i < spec.M; ++i) value += a.rate_weight(i) * rates[i];
  for (std::size_t l = 0; l < spec.L; ++l) {
    if (a.distortion_weight(l) != 0.0) value += a.distortion_weight(l) * distortion_component(aug, l).value;
  }
  return value;
}

DecompositionReport verify_linear_decomposition(const ProblemSpec& spec, const ChannelSet& channels,
                                                const Direction& a, double tol) {
  const auto aug = attach_channels(spec, channels);
  const double direct = direct_objective(aug, a);
  DecompositionReport report;
  for (std::size_t k = spec.J; k < spec.M; ++k) {
    FunctionalContext ctx(spec, k, channels, a);
    const auto pair = forward_to_reverse(spec, k, channels[k - spec.J]);
    double functional = 0.0;
    for (std::size_t z = 0; z < pair.weights.size(); ++z) {
      if (pair.weights[z] > 0.0) functional += pair.weights[z] * ctx.theta(pair.columns[z]);
    }
    DecompositionEntry e{k, functional, direct, std::abs(functional - direct)};
    report.max_gap = std::max(report.max_gap, e.gap);
    if (e.gap > tol) report.passed = false;
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace canreg
