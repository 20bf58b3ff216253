#include "canreg/simplex_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace canreg {

namespace {

constexpr double kPivotEps = 1e-12;
constexpr double kCostEps = 1e-12;

class Tableau {
 public:
  // Columns: original variables, then one artificial per row, then rhs.
  Tableau(const LinearProgram& lp) : m_(lp.rows), n_(lp.cols), width_(lp.cols + lp.rows + 1) {
    cells_.assign((m_ + 1) * width_, 0.0);
    basis_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      const double sign = lp.b[r] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(r, j) = sign * lp.A[r * n_ + j];
      at(r, n_ + r) = 1.0;
      at(r, width_ - 1) = sign * lp.b[r];
      basis_[r] = n_ + r;
    }
  }

  double& at(std::size_t r, std::size_t c) { return cells_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return cells_[r * width_ + c]; }
  double& cost(std::size_t c) { return at(m_, c); }
  double rhs(std::size_t r) const { return at(r, width_ - 1); }

  // Reduced-cost row for `obj`; columns past its end cost nothing.
  void set_objective(const std::vector<double>& obj) {
    for (std::size_t c = 0; c < width_; ++c) cost(c) = c < obj.size() ? obj[c] : 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = basis_[r] < obj.size() ? obj[basis_[r]] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) cost(c) -= cb * at(r, c);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t c = 0; c < width_; ++c) at(row, c) /= p;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) at(r, c) -= f * at(row, c);
    }
    basis_[row] = col;
    ++pivots_;
  }

  // Bland's rule over columns [0, active).
  void optimize(std::size_t active) {
    for (;;) {
      std::size_t enter = active;
      for (std::size_t c = 0; c < active; ++c) {
        if (cost(c) < -kCostEps) {
          enter = c;
          break;
        }
      }
      if (enter == active) return;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotEps) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < m_ && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == m_) throw std::runtime_error("solve_lp: objective is unbounded");
      pivot(leave, enter);
    }
  }

  std::size_t m_, n_, width_;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

// Weights w >= 0 with A_S w = b on the columns `subset`, by elimination
// with partial pivoting. False when the columns are dependent, the system
// is inconsistent or a weight is negative.
bool subset_weights(const LinearProgram& lp, const std::vector<std::size_t>& subset, std::vector<double>& w) {
  const std::size_t m = lp.rows, s = subset.size();
  std::vector<double> a(m * (s + 1));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < s; ++j) a[r * (s + 1) + j] = lp.A[r * lp.cols + subset[j]];
    a[r * (s + 1) + s] = lp.b[r];
  }
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * (s + 1) + c]; };
  for (std::size_t j = 0; j < s; ++j) {
    std::size_t piv = j;
    for (std::size_t r = j + 1; r < m; ++r) {
      if (std::abs(at(r, j)) > std::abs(at(piv, j))) piv = r;
    }
    if (std::abs(at(piv, j)) <= 1e-10) return false;
    for (std::size_t c = 0; c <= s; ++c) std::swap(at(j, c), at(piv, c));
    for (std::size_t r = 0; r < m; ++r) {
      if (r == j) continue;
      const double f = at(r, j) / at(j, j);
      if (f == 0.0) continue;
      for (std::size_t c = j; c <= s; ++c) at(r, c) -= f * at(j, c);
    }
  }
  for (std::size_t r = s; r < m; ++r) {
    if (std::abs(at(r, s)) > 1e-10) return false;
  }
  w.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    w[j] = at(j, s) / at(j, j);
    if (w[j] < -1e-12) return false;
    w[j] = std::max(0.0, w[j]);
  }
  return true;
}

// Among optimal solutions supported on the zero-reduced-cost columns, the
// one with the smallest support, then the lexicographically smallest x.
// Empty when the enumeration would exceed its limit.
std::vector<double> preferred_optimum(const LinearProgram& lp, const std::vector<std::size_t>& tied) {
  constexpr double kLimit = 2e5;
  const std::size_t n = tied.size();
  double work = 0.0;
  double choose = 1.0;
  for (std::size_t s = 1; s <= std::min(lp.rows, n); ++s) {
    choose = choose * static_cast<double>(n - s + 1) / static_cast<double>(s);
    work += choose;
    if (work > kLimit) return {};
    std::vector<double> best;
    std::vector<std::size_t> pick(s);
    for (std::size_t i = 0; i < s; ++i) pick[i] = i;
    std::vector<std::size_t> subset(s);
    std::vector<double> w;
    for (;;) {
      for (std::size_t i = 0; i < s; ++i) subset[i] = tied[pick[i]];
      if (subset_weights(lp, subset, w)) {
        std::vector<double> x(lp.cols, 0.0);
        for (std::size_t i = 0; i < s; ++i) x[subset[i]] = w[i];
        if (best.empty() || x < best) best = std::move(x);
      }
      std::size_t i = s;
      while (i > 0 && pick[i - 1] == n - s + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < s; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!best.empty()) return best;
  }
  return {};
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.A.size() != lp.rows * lp.cols || lp.b.size() != lp.rows || lp.c.size() != lp.cols) {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }
  Tableau t(lp);
  const std::size_t n = lp.cols;

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1(n + lp.rows, 0.0);
  for (std::size_t r = 0; r < lp.rows; ++r) phase1[n + r] = 1.0;
  t.set_objective(phase1);
  t.optimize(n + lp.rows);
  double infeasibility = 0.0;
  for (std::size_t r = 0; r < lp.rows; ++r) {
    if (t.basis_[r] >= n) infeasibility += t.rhs(r);
  }
  if (infeasibility > 1e-9) throw std::runtime_error("solve_lp: program is infeasible");

  // Drive zero-level artificials out of the basis; rows where that is
  // impossible are redundant and stay pinned at zero.
  for (std::size_t r = 0; r < lp.rows; ++r) {
    if (t.basis_[r] < n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::abs(t.at(r, c)) > 1e-9) {
        t.pivot(r, c);
        break;
      }
    }
  }

  t.set_objective(lp.c);
  t.optimize(n);

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < lp.rows; ++r) {
    if (t.basis_[r] < n) sol.x[t.basis_[r]] = std::max(0.0, t.rhs(r));
  }
  std::vector<std::size_t> tied;
  for (std::size_t c = 0; c < n; ++c) {
    if (t.cost(c) <= kCostEps) tied.push_back(c);
  }
  if (auto x = preferred_optimum(lp, tied); !x.empty()) sol.x = std::move(x);
  for (std::size_t j = 0; j < n; ++j) {
    if (sol.x[j] > 0.0) sol.basis.push_back(j);
  }
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];
  sol.pivots = t.pivots_;
  return sol;
}

}  // namespace canreg
