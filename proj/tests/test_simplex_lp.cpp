#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "canreg/simplex_lp.hpp"
#include "reference.hpp"

using namespace canreg;

namespace {

// Mixture LP of the single-channel step: columns are simplex points.
LinearProgram mixture_lp(std::size_t rows, std::size_t random_cols, std::mt19937_64& rng, bool with_vertices) {
  LinearProgram lp;
  lp.rows = rows;
  std::vector<std::vector<double>> cols;
  if (with_vertices) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> e(rows, 0.0);
      e[r] = 1.0;
      cols.push_back(e);
    }
  }
  for (std::size_t j = 0; j < random_cols; ++j) cols.push_back(ref::dirichlet(rows, rng));
  lp.cols = cols.size();
  lp.A.assign(rows * lp.cols, 0.0);
  for (std::size_t j = 0; j < lp.cols; ++j)
    for (std::size_t r = 0; r < rows; ++r) lp.A[r * lp.cols + j] = cols[j][r];
  lp.b = ref::dirichlet(rows, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t j = 0; j < lp.cols; ++j) lp.c.push_back(u(rng));
  return lp;
}

}  // namespace

TEST(SimplexLp, MatchesExhaustiveBasesOnSmallPools) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 2 + trial % 2;
    const auto lp = mixture_lp(rows, 4 - rows, rng, true);
    ASSERT_EQ(lp.cols, 4u);
    const auto sol = solve_lp(lp);
    const double expected = ref::exhaustive_lp(lp.rows, lp.cols, lp.A, lp.b, lp.c);
    EXPECT_NEAR(sol.objective, expected, 1e-10);
  }
}

TEST(SimplexLp, BasicSolutionAndFeasibility) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto lp = mixture_lp(3, 40, rng, true);
    const auto sol = solve_lp(lp);
    std::size_t positive = 0;
    for (double x : sol.x) {
      EXPECT_GE(x, 0.0);
      positive += x > 0.0;
    }
    EXPECT_LE(positive, lp.rows);
    for (std::size_t r = 0; r < lp.rows; ++r) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < lp.cols; ++j) lhs += lp.A[r * lp.cols + j] * sol.x[j];
      EXPECT_NEAR(lhs, lp.b[r], 1e-12);
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < lp.cols; ++j) obj += lp.c[j] * sol.x[j];
    EXPECT_NEAR(obj, sol.objective, 1e-12);
    EXPECT_NEAR(sol.objective, ref::exhaustive_lp(lp.rows, lp.cols, lp.A, lp.b, lp.c), 1e-10);
  }
}

TEST(SimplexLp, DegenerateTiesTerminate) {
  // Every column costs the same; many optimal bases.
  LinearProgram lp;
  lp.rows = 2;
  lp.cols = 5;
  lp.A = {1, 0, 0.5, 0.5, 0.5, 0, 1, 0.5, 0.5, 0.5};
  lp.b = {0.5, 0.5};
  lp.c = {1, 1, 1, 1, 1};
  const auto sol = solve_lp(lp);
  EXPECT_NEAR(sol.objective, 1.0, 1e-15);
  EXPECT_EQ(solve_lp(lp).x, sol.x);
  // One column suffices; of the three, the last gives the smallest x.
  EXPECT_EQ(sol.x, (std::vector<double>{0, 0, 0, 0, 1}));
  EXPECT_EQ(sol.basis, (std::vector<std::size_t>{4}));
}

TEST(SimplexLp, TiesPreferSmallSupportThenLexicographicWeights) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    // Flat costs tie every feasible point; b is one of the columns.
    auto lp = mixture_lp(3, 6, rng, true);
    std::fill(lp.c.begin(), lp.c.end(), 0.5);
    const std::size_t pick = 3 + rng() % 6;
    for (std::size_t r = 0; r < 3; ++r) lp.b[r] = lp.A[r * lp.cols + pick];
    const auto sol = solve_lp(lp);
    ASSERT_EQ(sol.basis.size(), 1u);
    EXPECT_EQ(sol.basis[0], pick);
    EXPECT_NEAR(sol.x[pick], 1.0, 1e-12);
  }
}

TEST(SimplexLp, Infeasible) {
  LinearProgram lp;
  lp.rows = 2;
  lp.cols = 2;
  lp.A = {1, 0, 1, 0};
  lp.b = {0.3, 0.7};
  lp.c = {0, 0};
  EXPECT_THROW(solve_lp(lp), std::runtime_error);
}

TEST(SimplexLp, Unbounded) {
  LinearProgram lp;
  lp.rows = 1;
  lp.cols = 2;
  lp.A = {1, -1};
  lp.b = {1};
  lp.c = {0, -1};
  EXPECT_THROW(solve_lp(lp), std::runtime_error);
}

TEST(SimplexLp, NegativeRightHandSide) {
  LinearProgram lp;
  lp.rows = 1;
  lp.cols = 2;
  lp.A = {-1, -2};
  lp.b = {-2};
  lp.c = {1, 1};
  const auto sol = solve_lp(lp);
  EXPECT_NEAR(sol.objective, 1.0, 1e-15);
}
