#pragma once

#include <stdexcept>
#include <string>

namespace relinfo {

// Raised when a computation fails numerically (singular covariance blocks,
// non-converging iterations) as opposed to a caller-side validation error,
// which is reported via std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace relinfo
