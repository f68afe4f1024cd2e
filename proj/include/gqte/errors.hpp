#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gqte {

// Bad data or configuration, caught before any numerics run.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation point outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The induced-density denominator collapsed; the smoothing model has hit the
// boundary of its support.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative routine ran out of iterations. Carries the index of the
// offending element when there is one.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what, std::ptrdiff_t index = -1)
      : std::runtime_error(what), index_(index) {}
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

// The model cannot be run at all, e.g. the smoothing constraint already fails
// at the sampler's start point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical linear algebra or inversion failure that is not an input problem.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No admissible candidate survived a model-selection sweep.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gqte
