#pragma once

#include <stdexcept>
#include <string>

namespace rsdfo {

/// Dimension arguments (d, p, n_sims, cores) outside their valid range.
class InvalidDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real-valued argument outside the domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested evaluation path is not available for these parameters
/// (e.g. quadrature depth beyond the supported maximum).
class Unsupported : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Numerical procedure could not meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The black-box objective misbehaved (non-finite value, wrong dimension).
class ObjectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsdfo
