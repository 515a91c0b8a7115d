#pragma once

#include <stdexcept>
#include <string>

namespace turbocs {

// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization hit a non-positive pivot, or a normalization hit a zero column.
class DegenerateMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Experiment or model parameters are inconsistent (e.g. K >= L, s > L).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Krylov step size outside the convergence region of the Neumann series.
class StabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Extrinsic conversion is undefined: the posterior variance is not below the
// prior-side variance, so the estimate carries no new information.
class NoInformationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace turbocs
