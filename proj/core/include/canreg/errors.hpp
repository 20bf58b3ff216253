#pragma once

#include <stdexcept>
#include <string>

namespace canreg {

// Malformed arguments: unknown axes, overlapping variable sets, alphabet
// mismatches, inadmissible directions.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quantity that should be nonnegative came out clearly negative.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called outside its documented precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exhaustive computations that would exceed their evaluation budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double estimated_cost)
      : std::runtime_error(what), estimated_cost_(estimated_cost) {}

  double estimated_cost() const noexcept { return estimated_cost_; }

 private:
  double estimated_cost_;
};

}  // namespace canreg
