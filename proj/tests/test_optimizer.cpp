#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "canreg/errors.hpp"
#include "canreg/optimizer.hpp"
#include "fixtures.hpp"
#include "reference.hpp"

using namespace canreg;

namespace {

// Objective straight from the definitions, on the reference joint.
double reference_objective(const ProblemSpec& spec, const ChannelSet& channels, const Direction& a) {
  const auto t = ref::augment(spec, channels);
  double value = 0.0;
  for (std::size_t i = spec.J; i < spec.M; ++i) {
    std::vector<std::size_t> before;
    for (std::size_t j = 0; j < i; ++j) before.push_back(j);
    value += a.rate_weight(i) * ref::rate(spec, t, {i}, before);
  }
  for (std::size_t l = 0; l < spec.L; ++l) {
    if (a.distortion_weight(l) > 0.0) value += a.distortion_weight(l) * ref::exhaustive_distortion(spec, t, l, 1e7);
  }
  return value;
}

std::vector<std::vector<double>> sorted_columns(const Channel& q) {
  std::vector<std::vector<double>> cols(q.outputs, std::vector<double>(q.inputs));
  for (std::size_t x = 0; x < q.inputs; ++x)
    for (std::size_t z = 0; z < q.outputs; ++z) cols[z][x] = q(x, z);
  std::sort(cols.begin(), cols.end(), std::greater<>());
  return cols;
}

}  // namespace

TEST(RdEvaluator, MatchesGenericPath) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t M = 1 + trial % 3;
    const std::size_t J = trial % 4 == 3 ? std::min<std::size_t>(1, M) : 0;
    const auto spec = ref::random_problem(M, J, 1 + trial % 2, rng, 3);
    std::vector<std::size_t> z;
    for (std::size_t k = J; k < M; ++k) z.push_back(1 + rng() % 4);
    const auto channels = random_channels(spec, z, rng);
    const RdEvaluator ev(spec);
    const auto point = ev.evaluate(channels);
    const auto aug = attach_channels(spec, channels);
    const auto rates = corner_point(aug, Permutation::identity(M));
    for (std::size_t i = 0; i < M; ++i) EXPECT_NEAR(point.rates[i], rates[i], 1e-12);
    for (std::size_t l = 0; l < spec.L; ++l) {
      EXPECT_NEAR(point.distortions[l], distortion_component(aug, l).value, 1e-12);
      EXPECT_GE(point.distortions[l], 0.0);
      EXPECT_LE(point.distortions[l], spec.distortions[l].max() + 1e-12);
    }
    const auto a = Direction::random(spec, rng);
    EXPECT_NEAR(ev.objective(channels, a), weighted_objective(spec, channels, a), 1e-12);
  }
}

TEST(WeightedObjective, MatchesReferenceDefinitions) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto spec = ref::random_problem(2 + trial % 2, trial % 2, 1, rng);
    const auto channels = random_channels(spec, rng);
    const auto a = Direction::random(spec, rng);
    EXPECT_NEAR(weighted_objective(spec, channels, a), reference_objective(spec, channels, a), 1e-11);
  }
}

TEST(WeightedObjective, TrivialCases) {
  const auto spec = fixtures::load("dsbs.json");
  EXPECT_NEAR(weighted_objective(spec, identity_channels(spec), Direction(spec, {0, 0, 1})), 0.0, 1e-15);
  EXPECT_NEAR(weighted_objective(spec, constant_channels(spec), Direction::normalized(spec, {1, 1, 0})), 0.0, 1e-15);
}

TEST(SingleChannel, SupportAndMixtureFeasibility) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = ref::random_problem(2, 0, 1, rng, 3);
    const auto channels = random_channels(spec, rng);
    const auto a = Direction::random(spec, rng);
    const std::size_t k = trial % 2;
    const FunctionalContext ctx(spec, k, channels, a);
    const auto r = optimize_single_channel(ctx, 32, trial);
    EXPECT_LE(r.pair.support(), spec.x_alphabets[k].size);
    EXPECT_LE(r.pair.mixture_error(ctx.source_marginal()), 1e-9);
    // The incumbent's columns are in the pool.
    const auto inc = forward_to_reverse(spec, k, channels[k]);
    double incumbent = 0.0;
    for (std::size_t z = 0; z < inc.weights.size(); ++z) incumbent += inc.weights[z] * ctx.theta(inc.columns[z]);
    EXPECT_LE(r.objective, incumbent + 1e-12);
    EXPECT_LE(r.objective, ctx.theta(ctx.source_marginal()) + 1e-12);
    // The reported objective is the decomposition of the real objective.
    auto next = channels;
    next[k] = reverse_to_forward(spec, k, r.pair);
    EXPECT_NEAR(weighted_objective(spec, next, a), r.objective, 1e-9);
  }
}

TEST(SingleChannel, LinearThetaGivesValueAtMarginal) {
  std::mt19937_64 rng(47);
  const auto spec = ref::random_problem(2, 0, 1, rng, 3);
  const auto channels = random_channels(spec, rng);
  const Direction a(spec, {1.0, 0.0, 0.0});
  const FunctionalContext ctx(spec, 1, channels, a);
  EXPECT_NEAR(optimize_single_channel(ctx, 16, 1).objective, ctx.theta(ctx.source_marginal()), 1e-12);
}

TEST(SingleChannel, ConcaveThetaSplitsToExtremes) {
  // Distortion only on a binary source: Theta is concave on the segment.
  const auto spec = fixtures::load("bwz.json");
  const Direction a(spec, {0.0, 1.0});
  const FunctionalContext ctx(spec, 0, constant_channels(spec), a);
  const auto r = optimize_single_channel(ctx, 16, 3);
  EXPECT_LE(r.pair.support(), 2u);

  // 1-D grid over the segment and all 2-point mixtures through p.
  const auto p = ctx.source_marginal();
  double best = ctx.theta(p);
  const int n = 200;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double s = static_cast<double>(i) / n, t = static_cast<double>(j) / n;
      if (!(s <= p[0] && p[0] <= t) || s == t) continue;
      const double w = (t - p[0]) / (t - s);
      best = std::min(best, w * ctx.theta(std::vector<double>{s, 1 - s}) +
                                (1 - w) * ctx.theta(std::vector<double>{t, 1 - t}));
    }
  }
  EXPECT_NEAR(r.objective, best, 1e-12);
}

TEST(CoordinateDescent, MonotoneAndCapped) {
  std::mt19937_64 rng(51);
  OptimizeOptions opt;
  opt.candidates = 24;
  for (int trial = 0; trial < 10; ++trial) {
    const auto spec = ref::random_problem(2 + trial % 2, trial % 3 == 2 ? 1 : 0, 1, rng, 3);
    const auto a = Direction::random(spec, rng);
    const auto res = coordinate_descent(spec, a, random_channels(spec, rng), opt, trial);
    for (std::size_t i = 1; i < res.trace.size(); ++i) EXPECT_LE(res.trace[i], res.trace[i - 1] + 1e-10);
    for (std::size_t i = 1; i < res.steps.size(); ++i) EXPECT_LE(res.steps[i], res.steps[i - 1] + 1e-10);
    for (std::size_t k = spec.J; k < spec.M; ++k) EXPECT_LE(res.channels[k - spec.J].outputs, spec.x_alphabets[k].size);
    EXPECT_NEAR(res.objective, weighted_objective(spec, res.channels, a), 1e-9);
    EXPECT_NEAR(a.dot(res.rd_point.rates, res.rd_point.distortions), res.objective, 1e-12);
  }
}

TEST(CoordinateDescent, OptimalInitStopsAfterOneSweep) {
  const auto spec = fixtures::load("dsbs.json");
  const Direction a(spec, {0, 0, 1});
  const auto res = coordinate_descent(spec, a, identity_channels(spec), OptimizeOptions{}, 1);
  EXPECT_EQ(res.sweeps_run, 1u);
  ASSERT_EQ(res.trace.size(), 2u);
  EXPECT_EQ(res.trace[0], res.trace[1]);
  EXPECT_NEAR(res.objective, 0.0, 1e-15);
}

TEST(CoordinateDescent, RejectsOversizedOrZeroSweeps) {
  const auto spec = fixtures::load("bwz.json");
  const Direction a(spec, {0, 1});
  std::mt19937_64 rng(1);
  EXPECT_THROW(coordinate_descent(spec, a, random_channels(spec, {3}, rng), OptimizeOptions{}, 1), StructuralError);
  OptimizeOptions none;
  none.sweeps = 0;
  EXPECT_THROW(coordinate_descent(spec, a, identity_channels(spec), none, 1), StructuralError);
}

TEST(CoordinateDescent, Deterministic) {
  const auto spec = fixtures::load("dsbs.json");
  const auto a = Direction::normalized(spec, {0.2, 0.5, 0.8});
  const auto x = multi_start(spec, a, OptimizeOptions{}, 9);
  const auto y = multi_start(spec, a, OptimizeOptions{}, 9);
  EXPECT_EQ(x.objective, y.objective);
  EXPECT_EQ(x.channels, y.channels);
}

TEST(LatticeChannels, OneRepresentativePerRelabeling) {
  for (auto [nx, nz, grid] : {std::tuple{2u, 2u, 3u}, std::tuple{2u, 3u, 4u}, std::tuple{3u, 2u, 3u}, std::tuple{2u, 4u, 2u}}) {
    // All lattice channels, canonicalized by sorting columns.
    std::vector<std::vector<std::size_t>> rows;
    std::vector<std::size_t> cur(nz, 0);
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
      if (pos + 1 == nz) {
        cur[pos] = left;
        rows.push_back(cur);
        return;
      }
      for (std::size_t n = 0; n <= left; ++n) {
        cur[pos] = n;
        self(self, pos + 1, left - n);
      }
    };
    rec(rec, 0, grid);
    std::set<std::vector<std::vector<double>>> classes;
    std::vector<std::size_t> pick(nx, 0);
    while (true) {
      Channel q;
      q.inputs = nx;
      q.outputs = nz;
      for (auto r : pick)
        for (auto n : rows[r]) q.rows.push_back(static_cast<double>(n) / grid);
      classes.insert(sorted_columns(q));
      std::size_t pos = 0;
      while (pos < nx && ++pick[pos] == rows.size()) pick[pos++] = 0;
      if (pos == nx) break;
    }
    const auto lattice = lattice_channels(nx, nz, grid);
    EXPECT_EQ(lattice.size(), classes.size());
    std::set<std::vector<std::vector<double>>> seen;
    for (const auto& q : lattice) {
      EXPECT_NO_THROW(q.validate());
      seen.insert(sorted_columns(q));
    }
    EXPECT_EQ(seen.size(), lattice.size());
  }
}

TEST(Oracle, TrivialCases) {
  const auto spec = fixtures::load("dsbs.json");
  const auto a = Direction::normalized(spec, {0.3, 0.4, 0.9});
  const auto ones = brute_force_oracle(spec, a, {1, 1}, 5);
  EXPECT_NEAR(ones.objective, weighted_objective(spec, constant_channels(spec), a), 1e-12);
  const auto coarse = brute_force_oracle(spec, a, {2, 2}, 1);
  const auto fine = multi_start(spec, a, OptimizeOptions{}, 1);
  EXPECT_GE(coarse.objective, fine.objective - 1e-9);
  EXPECT_NEAR(coarse.objective, weighted_objective(spec, coarse.channels, a), 1e-12);
}

TEST(Oracle, BudgetRefusal) {
  const auto spec = fixtures::load("dsbs.json");
  const auto a = Direction::normalized(spec, {0.3, 0.4, 0.9});
  try {
    brute_force_oracle(spec, a, {4, 4}, 12, 1e3);
    FAIL() << "expected refusal";
  } catch (const BudgetError& e) {
    EXPECT_GT(e.estimated_cost(), 1e3);
  }
}

TEST(Oracle, IndependentOfThreadCount) {
  const auto spec = fixtures::load("dsbs.json");
  std::mt19937_64 rng(3);
  std::vector<Direction> dirs;
  for (int i = 0; i < 4; ++i) dirs.push_back(Direction::random(spec, rng));
  const auto one = brute_force_oracle(spec, dirs, {2, 2}, 8, kOracleBudget, 1);
  const auto many = brute_force_oracle(spec, dirs, {2, 2}, 8, kOracleBudget, 3);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    EXPECT_EQ(one.best[d].objective, many.best[d].objective);
    EXPECT_EQ(one.best[d].channels, many.best[d].channels);
    EXPECT_EQ(one.best[d].objective, brute_force_oracle(spec, dirs[d], {2, 2}, 8).objective);
  }
}

TEST(Oracle, CappedAndEnlargedAgreeOnBinarySource) {
  const auto spec = fixtures::load("bwz.json");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    const auto a = Direction::random(spec, rng);
    const double capped = brute_force_oracle(spec, a, {2}, 24).objective;
    const double enlarged = brute_force_oracle(spec, a, {4}, 12).objective;
    EXPECT_NEAR(capped, enlarged, 2e-2);
  }
}

TEST(Oracle, DescentDominatesLatticeWhenSeeded) {
  const auto spec = fixtures::load("dsbs.json");
  std::mt19937_64 rng(6);
  OptimizeOptions opt;
  opt.restarts = 3;
  for (int i = 0; i < 3; ++i) {
    const auto a = Direction::random(spec, rng);
    const auto oracle = brute_force_oracle(spec, a, {2, 2}, 10);
    const auto res = multi_start(spec, a, opt, i, {oracle.channels});
    EXPECT_LE(res.objective, oracle.objective + 1e-9);
  }
}

TEST(Oracle, DescentMatchesLatticeOnSymmetricPair) {
  const auto spec = fixtures::load("dsbs.json");
  for (auto [r2, d1] : {std::pair{1.0, 1.0}, std::pair{0.3, 1.0}, std::pair{1.0, 0.2}}) {
    const auto a = Direction::normalized(spec, {0.0, r2, d1});
    const double oracle = brute_force_oracle(spec, a, {2, 2}, 12).objective;
    const double descent = multi_start(spec, a, OptimizeOptions{}, 42).objective;
    EXPECT_NEAR(descent, oracle, 1e-2) << r2 << "," << d1;
  }
}

TEST(AlphabetBound, UselessChannels) {
  // Every source is conveyed losslessly: nothing to optimize.
  std::mt19937_64 rng(7);
  const auto spec = ref::random_problem(2, 2, 1, rng);
  const Direction a(spec, {0, 0, 1});
  const auto r = verify_alphabet_bound(spec, a, 4, 1e-2);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.capped_min, r.enlarged_min, 1e-15);
}

TEST(AlphabetBound, BinarySourceWithSideInformationPasses) {
  const auto spec = fixtures::load("bwz.json");
  std::mt19937_64 rng(8);
  std::vector<Direction> dirs;
  for (int i = 0; i < 5; ++i) dirs.push_back(Direction::random(spec, rng));
  for (const auto& r : verify_alphabet_bound(spec, dirs, 16, 1e-2, OptimizeOptions{}, 42)) {
    EXPECT_TRUE(r.passed) << r.capped_min << " vs " << r.enlarged_min;
    EXPECT_LE(r.capped_min, r.capped_oracle);
  }
}

TEST(Trace, AllWeightOnDistortion) {
  const auto spec = fixtures::load("bwz.json");
  const Direction dirs[] = {Direction(spec, {0, 1})};
  const auto pts = trace_inner_bound(spec, dirs, Permutation::identity(1), OptimizeOptions{}, 1);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].corner.distortions[0], 0.0, 1e-12);
}

TEST(Trace, PermutationsShareDistortions) {
  const auto spec = fixtures::load("helper3.json");
  std::mt19937_64 rng(9);
  std::vector<Direction> dirs;
  for (int i = 0; i < 3; ++i) dirs.push_back(Direction::random(spec, rng));
  OptimizeOptions opt;
  opt.restarts = 3;
  const Permutation p({2, 0, 1});
  const auto id = trace_inner_bound(spec, dirs, Permutation::identity(3), opt, 4);
  const auto other = trace_inner_bound(spec, dirs, p, opt, 4);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    EXPECT_EQ(id[d].corner.distortions, other[d].corner.distortions);
    const auto expected = corner_point(attach_channels(spec, other[d].result.channels), p);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(other[d].corner.rates[i], expected[i], 1e-15);
    double a = 0.0, b = 0.0;
    for (double r : id[d].corner.rates) a += r;
    for (double r : other[d].corner.rates) b += r;
    EXPECT_NEAR(a, b, 1e-9);
  }
}

TEST(Trace, QuarterCircleIsMonotone) {
  const auto spec = fixtures::load("bwz.json");
  std::vector<Direction> dirs;
  for (int j = 0; j < 17; ++j) {
    const double th = std::numbers::pi / 2 * j / 16.0;
    dirs.push_back(Direction::normalized(spec, {j == 16 ? 0.0 : std::cos(th), j == 0 ? 0.0 : std::sin(th)}));
  }
  const auto pts = trace_inner_bound(spec, dirs, Permutation::identity(1), OptimizeOptions{}, 42);
  std::vector<std::pair<double, double>> rd;
  for (const auto& p : pts) rd.emplace_back(p.corner.rates[0], p.corner.distortions[0]);
  std::sort(rd.begin(), rd.end());
  for (std::size_t i = 1; i < rd.size(); ++i) EXPECT_LE(rd[i].second, rd[i - 1].second + 1e-9);
}
