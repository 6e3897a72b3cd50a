#pragma once

#include <stdexcept>
#include <string>

namespace kronspec {

// Raised when a numerical routine cannot deliver a result it guarantees
// (eigensolver non-convergence, wrong root count, failed extrapolation).
// Argument and guard violations use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kronspec
