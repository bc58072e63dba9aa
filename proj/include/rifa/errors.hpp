#pragma once

#include <stdexcept>
#include <string>

namespace rifa {

// Invalid model or contract parameters (bad ordering, out-of-range values).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Problem size exceeds an enforced cap.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// An iterative routine failed to converge. Carries the best objective value
// reached so callers can still report something.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double best_value)
      : std::runtime_error(what), best_value_(best_value) {}
  explicit NumericalFailure(const std::string& what)
      : NumericalFailure(what, 0.0) {}

  double best_value() const noexcept { return best_value_; }

 private:
  double best_value_;
};

}  // namespace rifa
