#pragma once

#include <stdexcept>
#include <string>

namespace pinvlab {

// Malformed arguments: non-finite entries, dimension mismatch, bad step sizes.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematically out-of-domain inputs: non-symmetric, not positive definite, c1 <= 0.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// F = 0, R = 0 and similar probability-zero configurations.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric rank changed inside a finite-difference stencil.
class UnstablePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pinvlab
