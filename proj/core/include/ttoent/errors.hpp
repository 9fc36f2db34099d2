#pragma once

#include <stdexcept>
#include <string>

namespace ttoent {

/// Malformed or out-of-contract input (non-Hermitian matrix, bad parameter range, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem size exceeds what dense storage / dense diagonalization can handle.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data is structurally unable to support the requested fit (e.g. a single
/// system size, or rescaled curves with disjoint supports).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested configuration is outside the supported set (e.g. reference
/// curves for local dimension > 3).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ttoent
