#pragma once

#include <stdexcept>
#include <string>

namespace ridge {

/// Raised when an operation is called with arguments that violate its
/// preconditions (dimension mismatch, out-of-range parameters, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a builder cannot produce a combination, e.g. a stratum that
/// never accepts a draw within its retry budget.
class BuildFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ridge
