#pragma once

#include <stdexcept>
#include <string>

namespace itwa {

/// Bad input: malformed files, invalid parameters, mismatched sizes.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem too large for an exact oracle.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Integration produced unusable results (too many invalid trajectories).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace itwa
