#pragma once

#include <stdexcept>
#include <string>

namespace equid {

// Bad input or a violated operation precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured work or memory budget would be exceeded; the question is
// undecided rather than answered.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Floating-point error bounds are too wide to round a count safely.
class PrecisionLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two independent computation routes disagreed, or an asserted mathematical
// invariant failed at run time.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace equid
