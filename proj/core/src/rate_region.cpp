#include "canreg/rate_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "canreg/errors.hpp"

namespace canreg {

Permutation::Permutation(std::vector<std::size_t> order) : order_(std::move(order)) {
  std::vector<bool> seen(order_.size(), false);
  for (auto v : order_) {
    if (v >= order_.size() || seen[v]) throw StructuralError("Permutation: not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return Permutation(std::move(order));
}

VarSet Permutation::suffix(std::size_t first) const {
  VarSet s;
  for (std::size_t i = first; i < order_.size(); ++i) s = s | VarSet::single(order_[i]);
  return s;
}

VarSet Permutation::prefix(std::size_t last) const {
  VarSet s;
  for (std::size_t i = 0; i < last && i < order_.size(); ++i) s = s | VarSet::single(order_[i]);
  return s;
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < order_.size(); ++i) os << (i ? " " : "") << order_[i] + 1;
  os << ')';
  return os.str();
}

double rate_term(const AugmentedPmf& aug, VarSet sources, VarSet conditioning) {
  const VarSet all = aug.all_sources();
  if (sources.empty()) throw StructuralError("rate_term: empty source set");
  if (!sources.subset_of(all) || !conditioning.subset_of(all)) {
    throw StructuralError("rate_term: sets must contain source indices only");
  }
  if (!sources.disjoint(conditioning)) throw StructuralError("rate_term: source and conditioning sets overlap");

  // Sources below J have Z = X, so their share of the information term is
  // the plain conditional entropy of X.
  const VarSet lossless = sources & VarSet::range(0, aug.spec().J);
  const VarSet coded = sources - lossless;
  const VarSet given = aug.z_set(conditioning) | aug.s();
  double value = 0.0;
  if (!lossless.empty()) value += std::max(0.0, entropy(aug.joint(), aug.x_set(lossless), given));
  if (!coded.empty()) value += cmi(aug.joint(), aug.x_set(coded), aug.z_set(coded), given | aug.x_set(lossless));
  return value;
}

double rate_lhs(const AugmentedPmf& aug, VarSet sources) {
  return rate_term(aug, sources, aug.all_sources() - sources);
}

double auxiliary_dependence(const AugmentedPmf& aug, VarSet a, VarSet b, VarSet conditioning) {
  if (!a.disjoint(b) || !a.disjoint(conditioning) || !b.disjoint(conditioning)) {
    throw StructuralError("auxiliary_dependence: source sets must be pairwise disjoint");
  }
  return cmi(aug.joint(), aug.z_set(a), aug.z_set(b), aug.z_set(conditioning) | aug.s());
}

std::vector<VarSet> ConstraintReport::active_family() const {
  std::vector<VarSet> out;
  for (const auto& e : entries) {
    if (e.active) out.push_back(e.subset);
  }
  return out;
}

std::size_t ConstraintReport::active_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.active; }));
}

double ConstraintReport::worst_slack() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) worst = std::min(worst, e.slack);
  return worst;
}

ConstraintReport membership(const AugmentedPmf& aug, const RateVector& rates, double tol) {
  const std::size_t M = aug.sources();
  if (rates.size() != M) throw StructuralError("membership: rate vector has the wrong length");
  ConstraintReport report;
  report.member = true;
  const std::uint64_t full = (std::uint64_t{1} << M) - 1;
  for (std::uint64_t mask = 1; mask <= full; ++mask) {
    ConstraintEntry e;
    e.subset = VarSet(mask);
    e.lhs = rate_lhs(aug, e.subset);
    for (auto i : e.subset.members()) e.rhs += rates[i];
    e.slack = e.rhs - e.lhs;
    e.active = std::abs(e.slack) <= tol;
    if (e.slack < -tol) report.member = false;
    report.entries.push_back(e);
  }
  return report;
}

RateVector corner_point(const AugmentedPmf& aug, const Permutation& perm) {
  const std::size_t M = aug.sources();
  if (perm.size() != M) throw StructuralError("corner_point: permutation size differs from M");
  RateVector rates(M, 0.0);
  for (std::size_t i = 0; i < M; ++i) rates[perm[i]] = rate_term(aug, VarSet::single(perm[i]), perm.prefix(i));
  return rates;
}

NondegeneracyReport nondegeneracy_preflight(const AugmentedPmf& aug, double threshold) {
  const std::size_t M = aug.sources();
  NondegeneracyReport report;
  report.smallest = std::numeric_limits<double>::infinity();
  // Each source goes to A (0), B (1) or the conditioning rest (2).
  std::size_t assignments = 1;
  for (std::size_t i = 0; i < M; ++i) assignments *= 3;
  for (std::size_t code = 0; code < assignments; ++code) {
    VarSet a, b, rest;
    std::size_t c = code;
    for (std::size_t i = 0; i < M; ++i, c /= 3) {
      const auto bit = VarSet::single(i);
      switch (c % 3) {
        case 0: a = a | bit; break;
        case 1: b = b | bit; break;
        default: rest = rest | bit; break;
      }
    }
    if (a.empty() || b.empty()) continue;
    // Unordered pairs: the set holding the smallest index plays A.
    if (std::countr_zero(a.bits()) > std::countr_zero(b.bits())) continue;
    const double dep = auxiliary_dependence(aug, a, b, rest);
    if (dep < report.smallest) {
      report.smallest = dep;
      report.worst_a = a;
      report.worst_b = b;
    }
    if (dep < threshold) {
      report.passed = false;
      std::ostringstream os;
      os << "extraneous Markov chain: I(Z_A; Z_B | rest, S) = " << dep << " for A = " << a.to_string()
         << ", B = " << b.to_string();
      report.warnings.push_back(os.str());
    }
  }
  if (!std::isfinite(report.smallest)) report.smallest = 0.0;
  return report;
}

ExtremePointSet enumerate_extreme_points(const AugmentedPmf& aug, double tol) {
  const std::size_t M = aug.sources();
  if (M > kMaxEnumerationSources) {
    throw StructuralError("enumerate_extreme_points: refusing M = " + std::to_string(M) + " (limit " +
                          std::to_string(kMaxEnumerationSources) + ", M! corners)");
  }
  ExtremePointSet out;
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), std::size_t{0});
  do {
    Permutation perm(order);
    out.points.push_back({perm, corner_point(aug, perm)});
  } while (std::next_permutation(order.begin(), order.end()));

  auto gap = [](const RateVector& a, const RateVector& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
    return g;
  };
  std::vector<const RateVector*> representatives;
  out.min_pairwise_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) out.min_pairwise_gap = std::min(out.min_pairwise_gap, gap(out.points[i].rates, out.points[j].rates));
    const bool fresh = std::none_of(representatives.begin(), representatives.end(),
                                    [&](const RateVector* r) { return gap(*r, out.points[i].rates) <= tol; });
    if (fresh) representatives.push_back(&out.points[i].rates);
  }
  if (out.points.size() < 2) out.min_pairwise_gap = 0.0;
  out.distinct = representatives.size();
  out.preflight = nondegeneracy_preflight(aug);
  return out;
}

RateVector sample_region_point(const ExtremePointSet& corners, std::mt19937_64& rng) {
  if (corners.points.empty()) throw StructuralError("sample_region_point: no corners");
  const std::size_t M = corners.points.front().rates.size();
  std::uniform_int_distribution<std::size_t> pick(0, corners.points.size() - 1);
  std::uniform_int_distribution<std::size_t> count(1, 3);
  std::exponential_distribution<double> expo(1.0);
  const std::size_t n = count(rng);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) total += v = expo(rng);
  RateVector r(M, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& c = corners.points[pick(rng)].rates;
    for (std::size_t i = 0; i < M; ++i) r[i] += w[j] / total * c[i];
  }
  if (std::bernoulli_distribution(0.5)(rng)) {
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < M; ++i) {
      if (coin(rng)) r[i] += 0.1 * expo(rng);
    }
  }
  return r;
}

bool is_chain(const std::vector<VarSet>& family) {
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      if (!family[i].subset_of(family[j]) && !family[j].subset_of(family[i])) return false;
    }
  }
  return true;
}

bool verify_noncrossing(const AugmentedPmf& aug, const RateVector& rates, double tol) {
  const auto report = membership(aug, rates, tol);
  if (!report.member) throw PreconditionError("verify_noncrossing: rate vector is outside the region");
  return is_chain(report.active_family());
}

std::string to_string(ChainIdentity id) {
  switch (id) {
    case ChainIdentity::ConditioningSplit: return "conditioning-split";
    case ChainIdentity::DisjointUnion: return "disjoint-union";
    case ChainIdentity::RestrictedUnion: return "restricted-union";
    case ChainIdentity::ElementwiseExpansion: return "elementwise-expansion";
    case ChainIdentity::PrefixChain: return "prefix-chain";
    case ChainIdentity::SuffixChain: return "suffix-chain";
    case ChainIdentity::ConditioningBound: return "conditioning-bound";
  }
  return "unknown";
}

namespace {

class IdentityChecker {
 public:
  IdentityChecker(ChainIdentityReport& report, double tol) : report_(report), tol_(tol) {}

  void equality(ChainIdentity id, double lhs, double rhs, VarSet first, VarSet second,
                const std::vector<std::size_t>& order) {
    ++report_.checks;
    const double g = std::abs(lhs - rhs);
    report_.max_equality_gap = std::max(report_.max_equality_gap, g);
    if (g > tol_) report_.violations.push_back({id, first, second, order, lhs, rhs});
  }

  void bound(ChainIdentity id, double lhs, double rhs, VarSet first, const std::vector<std::size_t>& order) {
    ++report_.checks;
    report_.min_inequality_slack = std::min(report_.min_inequality_slack, rhs - lhs);
    if (lhs > rhs + tol_) report_.violations.push_back({id, first, {}, order, lhs, rhs});
  }

 private:
  ChainIdentityReport& report_;
  double tol_;
};

}  // namespace

ChainIdentityReport verify_chain_identities(const AugmentedPmf& aug, std::size_t trials, double tol,
                                            std::uint64_t seed) {
  const std::size_t M = aug.sources();
  const VarSet all = aug.all_sources();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> three(0, 2);
  std::uniform_int_distribution<std::uint64_t> any_subset(1, (std::uint64_t{1} << M) - 1);

  ChainIdentityReport report;
  report.min_inequality_slack = std::numeric_limits<double>::infinity();
  IdentityChecker check(report, tol);

  std::vector<std::size_t> order(M);
  for (std::size_t t = 0; t < trials; ++t) {
    ++report.draws;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const Permutation perm(order);

    if (M >= 2) {
      VarSet first, second, rest;
      do {
        first = second = rest = VarSet{};
        for (std::size_t i = 0; i < M; ++i) {
          const auto bit = VarSet::single(i);
          switch (three(rng)) {
            case 0: first = first | bit; break;
            case 1: second = second | bit; break;
            default: rest = rest | bit; break;
          }
        }
      } while (first.empty() || second.empty());
      const VarSet both = first | second;

      check.equality(ChainIdentity::ConditioningSplit, rate_term(aug, first, all - both),
                     rate_term(aug, first, all - first) + auxiliary_dependence(aug, first, second, all - both), first,
                     second, {});
      check.equality(ChainIdentity::DisjointUnion, rate_term(aug, both, all - both),
                     rate_term(aug, first, all - both) + rate_term(aug, second, all - second), first, second, {});

      VarSet hull = both;
      for (auto i : rest.members()) {
        if (three(rng) != 0) hull = hull | VarSet::single(i);
      }
      check.equality(ChainIdentity::RestrictedUnion, rate_term(aug, both, hull - both),
                     rate_term(aug, first, hull - both) + rate_term(aug, second, hull - second), first, second, {});
    }

    // Elementwise expansion of a random subset in a random element order.
    const VarSet subset(any_subset(rng));
    std::vector<std::size_t> elems;
    for (auto i : order) {
      if (subset.contains(i)) elems.push_back(i);
    }
    double expansion = 0.0;
    for (std::size_t j = 0; j < elems.size(); ++j) {
      VarSet tail;
      for (std::size_t r = j; r < elems.size(); ++r) tail = tail | VarSet::single(elems[r]);
      expansion += rate_term(aug, VarSet::single(elems[j]), all - tail);
    }
    const double subset_lhs = rate_lhs(aug, subset);
    check.equality(ChainIdentity::ElementwiseExpansion, subset_lhs, expansion, subset, {}, elems);

    // Chains along the sampled ordering.
    std::vector<double> step(M);
    for (std::size_t i = 0; i < M; ++i) step[i] = rate_term(aug, VarSet::single(perm[i]), perm.prefix(i));
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, M)(rng);
    const double prefix_sum = std::accumulate(step.begin(), step.begin() + static_cast<std::ptrdiff_t>(m), 0.0);
    check.equality(ChainIdentity::PrefixChain, rate_term(aug, perm.prefix(m), {}), prefix_sum, perm.prefix(m), {},
                   order);
    if (m < M) {
      const double suffix_sum = std::accumulate(step.begin() + static_cast<std::ptrdiff_t>(m), step.end(), 0.0);
      check.equality(ChainIdentity::SuffixChain, rate_term(aug, perm.suffix(m), perm.prefix(m)), suffix_sum,
                     perm.suffix(m), {}, order);
    }

    double bound = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      if (subset.contains(perm[i])) bound += step[i];
    }
    check.bound(ChainIdentity::ConditioningBound, subset_lhs, bound, subset, order);
  }
  if (!std::isfinite(report.min_inequality_slack)) report.min_inequality_slack = 0.0;
  return report;
}

}  // namespace canreg
