#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace canreg {

/// Standard-form linear program: minimize c.x subject to A x = b, x >= 0,
/// with A dense row-major (rows x cols).
struct LinearProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> A;
  std::vector<double> b;
  std::vector<double> c;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  /// Columns with x > 0, ascending.
  std::vector<std::size_t> basis;
  std::size_t pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's rule, so it terminates on
/// degenerate problems. Returns a basic optimal solution: at most `rows`
/// entries of x are positive. Among tied optima it prefers the smallest
/// support, then the lexicographically smallest x; when the tied columns
/// are too many to enumerate it keeps the simplex basis. Throws
/// std::runtime_error when the program is infeasible or unbounded.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace canreg
