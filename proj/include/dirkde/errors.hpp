#pragma once

#include <stdexcept>
#include <string>

namespace dirkde {

/// Invalid argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Overflow, non-finite integrand, or failed convergence.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested optimum does not exist (e.g. uniform target under AMISE).
class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace dirkde
