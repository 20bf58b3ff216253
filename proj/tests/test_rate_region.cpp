#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "canreg/errors.hpp"
#include "canreg/rate_region.hpp"
#include "fixtures.hpp"
#include "reference.hpp"

using namespace canreg;

namespace {

std::vector<std::size_t> members(VarSet s) { return s.members(); }

}  // namespace

TEST(Permutation, Validation) {
  EXPECT_THROW(Permutation({0, 0, 1}), StructuralError);
  EXPECT_THROW(Permutation({0, 3}), StructuralError);
  const Permutation p({2, 0, 1});
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], 2u);
  EXPECT_EQ(p.prefix(1), VarSet::single(2));
  EXPECT_EQ(p.suffix(1), VarSet::of({0, 1}));
  EXPECT_EQ(Permutation::identity(3).to_string(), "(1 2 3)");
}

TEST(RateTerm, MatchesDefinition) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t M = 2 + trial % 2;
    const std::size_t J = trial % 3 == 0 ? 1 : 0;
    const auto spec = ref::random_problem(M, J, 1, rng);
    const auto channels = random_channels(spec, rng);
    const auto aug = attach_channels(spec, channels);
    const auto table = ref::augment(spec, channels);
    for (std::uint64_t I = 1; I < (1u << M); ++I) {
      const VarSet all = VarSet::range(0, M);
      const VarSet rest = all - VarSet(I);
      EXPECT_NEAR(rate_lhs(aug, VarSet(I)), ref::rate(spec, table, members(VarSet(I)), members(rest)), 1e-11);
      for (std::uint64_t C = 0; C < (1u << M); ++C) {
        if (I & C) continue;
        EXPECT_NEAR(rate_term(aug, VarSet(I), VarSet(C)), ref::rate(spec, table, members(VarSet(I)), members(VarSet(C))),
                    1e-11);
      }
    }
  }
}

TEST(RateTerm, RejectsBadSets) {
  const auto spec = fixtures::load("dsbs.json");
  const auto aug = attach_channels(spec, identity_channels(spec));
  EXPECT_THROW(rate_term(aug, VarSet{}, VarSet{}), StructuralError);
  EXPECT_THROW(rate_term(aug, VarSet::single(0), VarSet::single(0)), StructuralError);
}

TEST(CornerPoint, DsbsIdentityChannels) {
  const auto spec = fixtures::load("dsbs.json");
  const auto aug = attach_channels(spec, identity_channels(spec));
  const auto r = corner_point(aug, Permutation::identity(2));
  EXPECT_NEAR(r[0], 1.0, 1e-12);
  EXPECT_NEAR(r[1], ref::h2(0.1), 1e-12);
}

TEST(CornerPoint, ConstantChannelsGiveZero) {
  const auto spec = fixtures::load("dsbs.json");
  const auto aug = attach_channels(spec, constant_channels(spec));
  for (double r : corner_point(aug, Permutation({1, 0}))) EXPECT_NEAR(r, 0.0, 1e-15);
}

TEST(Membership, CornersAreMembersAndShiftsStayInside) {
  std::mt19937_64 rng(4);
  const auto spec = ref::random_problem(3, 0, 1, rng);
  const auto aug = attach_channels(spec, random_channels(spec, rng));
  const auto r = corner_point(aug, Permutation({1, 2, 0}));
  EXPECT_TRUE(membership(aug, r).member);
  auto shifted = r;
  shifted[1] += 0.1;
  EXPECT_TRUE(membership(aug, shifted).member);
  auto below = r;
  below[0] -= 1e-3;
  EXPECT_FALSE(membership(aug, below).member);
  EXPECT_THROW(membership(aug, {0.0, 0.0}), StructuralError);
}

TEST(ExtremePoints, Helper3HasSixDistinctChainCorners) {
  const auto spec = fixtures::load("helper3.json");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const auto aug = attach_channels(spec, random_channels(spec, rng));
    const auto set = enumerate_extreme_points(aug);
    ASSERT_TRUE(set.preflight.passed);
    EXPECT_EQ(set.points.size(), 6u);
    EXPECT_EQ(set.distinct, 6u);
    EXPECT_GT(set.min_pairwise_gap, 1e-6);
    for (const auto& p : set.points) {
      const auto rep = membership(aug, p.rates);
      EXPECT_TRUE(rep.member);
      EXPECT_EQ(rep.active_count(), 3u);
      EXPECT_TRUE(is_chain(rep.active_family()));
    }
  }
}

TEST(ExtremePoints, ActiveFamilyIsTheSuffixChain) {
  const auto spec = fixtures::load("helper3.json");
  std::mt19937_64 rng(8);
  const auto aug = attach_channels(spec, random_channels(spec, rng));
  const Permutation perm({2, 0, 1});
  const auto rep = membership(aug, corner_point(aug, perm));
  std::vector<VarSet> expected{perm.suffix(2), perm.suffix(1), perm.suffix(0)};
  auto family = rep.active_family();
  std::sort(family.begin(), family.end(), [](VarSet a, VarSet b) { return a.count() < b.count(); });
  EXPECT_EQ(family, expected);
}

TEST(ExtremePoints, ConstantChannelsCollapse) {
  const auto spec = fixtures::load("helper3.json");
  const auto set = enumerate_extreme_points(attach_channels(spec, constant_channels(spec)));
  EXPECT_FALSE(set.preflight.passed);
  EXPECT_LT(set.distinct, 6u);
  EXPECT_FALSE(set.preflight.warnings.empty());
}

TEST(ExtremePoints, RefusesLargeM) {
  std::mt19937_64 rng(1);
  const auto spec = ref::random_problem(7, 0, 0, rng, 2, 1, 1);
  const auto aug = attach_channels(spec, constant_channels(spec));
  EXPECT_THROW(enumerate_extreme_points(aug), StructuralError);
}

TEST(ExtremePoints, SumRateInvariance) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto spec = ref::random_problem(3, trial % 2, 1, rng);
    const auto channels = random_channels(spec, rng);
    const auto aug = attach_channels(spec, channels);
    const auto table = ref::augment(spec, channels);
    const double total = ref::rate(spec, table, {0, 1, 2}, {});
    for (const auto& p : enumerate_extreme_points(aug).points) {
      EXPECT_NEAR(std::accumulate(p.rates.begin(), p.rates.end(), 0.0), total, 1e-9);
    }
  }
}

TEST(IsChain, Basics) {
  EXPECT_TRUE(is_chain({}));
  EXPECT_TRUE(is_chain({VarSet::single(1), VarSet::of({0, 1}), VarSet::of({0, 1, 2})}));
  EXPECT_FALSE(is_chain({VarSet::single(0), VarSet::single(1)}));
}

TEST(Noncrossing, RandomMembersHaveChainFamilies) {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int trial = 0; trial < 20 && checked < 5; ++trial) {
    const auto spec = ref::random_problem(3, 0, 1, rng);
    const auto aug = attach_channels(spec, random_channels(spec, rng));
    const auto set = enumerate_extreme_points(aug);
    if (!set.preflight.passed) continue;
    ++checked;
    for (int m = 0; m < 50; ++m) {
      const auto r = sample_region_point(set, rng);
      EXPECT_TRUE(verify_noncrossing(aug, r));
    }
  }
  EXPECT_EQ(checked, 5);
}

TEST(Noncrossing, RejectsNonMembers) {
  const auto spec = fixtures::load("dsbs.json");
  const auto aug = attach_channels(spec, identity_channels(spec));
  EXPECT_THROW(verify_noncrossing(aug, {0.0, 0.0}), PreconditionError);
}

TEST(Nondegeneracy, IndependentSourcesFail) {
  // Independent sources make every auxiliary dependence vanish.
  ProblemSpec spec = fixtures::load("dsbs.json");
  spec.source = JointPmf(spec.source.axes(), {0.25, 0, 0, 0.25, 0, 0.25, 0.25, 0});
  const auto rep = nondegeneracy_preflight(attach_channels(spec, identity_channels(spec)));
  EXPECT_FALSE(rep.passed);
  EXPECT_LT(rep.smallest, 1e-12);
}

TEST(ChainIdentities, HoldOnRandomInstances) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 6; ++trial) {
    const auto spec = ref::random_problem(2 + trial % 2, trial % 3 == 2 ? 1 : 0, 1, rng, 3);
    const auto aug = attach_channels(spec, random_channels(spec, rng));
    const auto rep = verify_chain_identities(aug, 20, 1e-9, trial);
    EXPECT_TRUE(rep.passed()) << rep.violations.size() << " violations";
    EXPECT_EQ(rep.draws, 20u);
    EXPECT_GT(rep.checks, 20u);
    EXPECT_LE(rep.max_equality_gap, 1e-9);
    EXPECT_GE(rep.min_inequality_slack, -1e-9);
  }
}

TEST(ChainIdentities, DeterministicPerSeed) {
  std::mt19937_64 rng(2);
  const auto spec = ref::random_problem(3, 0, 1, rng);
  const auto aug = attach_channels(spec, random_channels(spec, rng));
  const auto a = verify_chain_identities(aug, 10, 1e-9, 5);
  const auto b = verify_chain_identities(aug, 10, 1e-9, 5);
  EXPECT_EQ(a.checks, b.checks);
  EXPECT_EQ(a.max_equality_gap, b.max_equality_gap);
}
