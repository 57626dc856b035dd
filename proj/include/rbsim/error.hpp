#pragma once

#include <stdexcept>
#include <string>

namespace rbsim {

// Invalid input: configuration fields, unphysical parameters, non-Clifford
// elements. The CLI maps these to exit status 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message)
      : std::runtime_error(message) {}
};

// Iterative numerics that failed to reach tolerance. CLI exit status 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& message)
      : std::runtime_error(message) {}
};

}  // namespace rbsim
