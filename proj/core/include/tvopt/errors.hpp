#pragma once

#include <stdexcept>
#include <string>

namespace tvopt {

/// Vector or matrix operands disagree in size.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity showed up where a finite number is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky met a non-positive pivot. The matrix is not positive definite,
/// which at a Hessian means strong convexity fails at that point.
class NotSpdError : public std::runtime_error {
 public:
  NotSpdError(const std::string& what, std::size_t pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// A derivative was requested from an oracle that cannot supply it.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid solver, problem or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A trajectory lacks the reference optimum needed for error statistics.
class MissingOptimumError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tvopt
