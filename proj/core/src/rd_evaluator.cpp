#include "canreg/rd_evaluator.hpp"

#include <cmath>
#include <limits>

#include "canreg/direction.hpp"
#include "canreg/errors.hpp"

namespace canreg {

namespace {

double entropy_bits(const double* p, std::size_t n) {
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
  }
  return h;
}

}  // namespace

RdEvaluator::RdEvaluator(const ProblemSpec& spec) : spec_(spec) {
  const std::size_t M = spec.M;
  const std::size_t J = spec.J;
  std::vector<VarSet> order;
  for (std::size_t i = 0; i < J; ++i) order.push_back(VarSet::single(i));
  order.push_back(VarSet::single(M));
  for (std::size_t i = J; i < M; ++i) order.push_back(VarSet::single(i));
  order.push_back(VarSet::single(M + 1));
  source_ = group_axes(spec.source, order).values;

  for (std::size_t i = 0; i < J; ++i) lossless_block_ *= spec.x_alphabets[i].size;
  lossless_block_ *= spec.s_alphabet.size;

  post_.assign(M, 0);
  std::size_t post = spec.v_alphabet.size;
  for (std::size_t i = M; i-- > 0;) {
    post_[i] = post;
    post *= spec.x_alphabets[i].size;
  }

  for (std::size_t k = 0; k < M; ++k) marginals_.push_back(spec.source_marginal(k));

  // Entropy of (X_{<J}, S) and the fixed rates H(X_i | X_{<i}, S), i < J.
  std::vector<double> block(lossless_block_, 0.0);
  const std::size_t tail = source_.size() / lossless_block_;
  for (std::size_t b = 0; b < lossless_block_; ++b) {
    for (std::size_t r = 0; r < tail; ++r) block[b] += source_[b * tail + r];
  }
  base_entropy_ = entropy_bits(block.data(), block.size());
  lossless_rates_.assign(M, 0.0);
  for (std::size_t i = 0; i < J; ++i) {
    lossless_rates_[i] = std::max(0.0, entropy(spec.source, VarSet::single(i), VarSet::range(0, i) | VarSet::single(M)));
  }
}

RdEvaluator::Workspace RdEvaluator::workspace() const {
  Workspace ws;
  ws.tensors.resize(spec_.M - spec_.J + 1);
  ws.tensors[0] = source_;
  ws.prefix_entropy.assign(spec_.M - spec_.J + 1, 0.0);
  ws.prefix_entropy[0] = base_entropy_;
  ws.rates = lossless_rates_;
  return ws;
}

double RdEvaluator::channel_entropy(std::size_t k, const double* rows, std::size_t outputs) const {
  const auto& p = marginals_[k];
  double h = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) h += p[x] * entropy_bits(rows + x * outputs, outputs);
  return h;
}

void RdEvaluator::apply(Workspace& ws, std::size_t k, const double* rows, std::size_t outputs,
                        double channel_entropy) const {
  const std::size_t level = k - spec_.J;
  const auto& in = ws.tensors[level];
  auto& out = ws.tensors[level + 1];
  const std::size_t nx = spec_.x_alphabets[k].size;
  const std::size_t post = post_[k];
  const std::size_t pre = in.size() / (nx * post);
  out.assign(pre * outputs * post, 0.0);

  for (std::size_t p = 0; p < pre; ++p) {
    for (std::size_t x = 0; x < nx; ++x) {
      const double* src = in.data() + (p * nx + x) * post;
      const double* q = rows + x * outputs;
      for (std::size_t z = 0; z < outputs; ++z) {
        const double w = q[z];
        if (w == 0.0) continue;
        double* dst = out.data() + (p * outputs + z) * post;
        for (std::size_t r = 0; r < post; ++r) dst[r] += w * src[r];
      }
    }
  }

  double h = 0.0;
  const std::size_t cells = pre * outputs;
  for (std::size_t c = 0; c < cells; ++c) {
    double m = 0.0;
    const double* src = out.data() + c * post;
    for (std::size_t r = 0; r < post; ++r) m += src[r];
    if (m > 0.0) h -= m * std::log2(m);
  }
  ws.prefix_entropy[level + 1] = h;
  ws.rates[k] = std::max(0.0, h - ws.prefix_entropy[level] - channel_entropy);
}

void RdEvaluator::finish(const Workspace& ws, double* out) const {
  const auto& w = ws.tensors.back();
  const std::size_t nv = spec_.v_alphabet.size;
  const std::size_t tuples = w.size() / nv;
  for (std::size_t l = 0; l < spec_.L; ++l) {
    const auto& d = spec_.distortions[l];
    double total = 0.0;
    for (std::size_t u = 0; u < tuples; ++u) {
      const double* mass = w.data() + u * nv;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t vhat = 0; vhat < d.cols; ++vhat) {
        double cost = 0.0;
        for (std::size_t v = 0; v < nv; ++v) cost += mass[v] * d.values[v * d.cols + vhat];
        if (cost < best) best = cost;
      }
      total += best;
    }
    out[l] = total;
  }
}

RDPoint RdEvaluator::evaluate(const ChannelSet& channels) const {
  if (channels.size() != spec_.M - spec_.J) throw StructuralError("RdEvaluator: expected one channel per k >= J");
  auto ws = workspace();
  for (std::size_t k = spec_.J; k < spec_.M; ++k) {
    const auto& q = channels[k - spec_.J];
    if (q.inputs != spec_.x_alphabets[k].size || q.rows.size() != q.inputs * q.outputs) {
      throw StructuralError("RdEvaluator: channel shape mismatch for source " + std::to_string(k + 1));
    }
    apply(ws, k, q.rows.data(), q.outputs, channel_entropy(k, q.rows.data(), q.outputs));
  }
  RDPoint point;
  point.rates = ws.rates;
  point.distortions.assign(spec_.L, 0.0);
  finish(ws, point.distortions.data());
  return point;
}

double RdEvaluator::objective(const ChannelSet& channels, const Direction& a) const {
  const auto point = evaluate(channels);
  return a.dot(point.rates, point.distortions);
}

}  // namespace canreg
