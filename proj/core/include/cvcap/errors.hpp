// SPDX-License-Identifier: Apache-2.0

#ifndef CVCAP_ERRORS_HPP
#define CVCAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cvcap {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: shape mismatch, asymmetry, indefiniteness, or a
/// covariance that violates the uncertainty relation where validity is
/// required.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Energy budget below the minimum attainable mean energy.
class InfeasibleEnergy : public Error {
 public:
  using Error::Error;
};

/// Requested construction only exists when the threshold condition holds.
class ThresholdViolation : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace cvcap

#endif  // CVCAP_ERRORS_HPP
