#pragma once

#include <stdexcept>
#include <string>

namespace pinflip {

// Precondition violated by a caller-supplied value.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Value lies outside the domain where the quantity is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request exceeds a documented size cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// State set is empty or not irreducible under the requested chain.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is degenerate for the requested statistic (e.g. constant test function).
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pinflip
