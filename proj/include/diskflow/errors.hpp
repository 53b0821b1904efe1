#pragma once

#include <stdexcept>
#include <string>

namespace diskflow {

/// Invalid caller input (bad ranges, malformed specs, violated preconditions).
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its accuracy target.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what, double error_estimate = 0.0)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// An internal invariant was violated (indicates a defect, not bad input).
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace diskflow
