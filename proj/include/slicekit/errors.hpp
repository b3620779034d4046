#pragma once

#include <stdexcept>
#include <string>

namespace slicekit {

// Bad user input: malformed config, invalid grid sizes, unknown keys.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failure: blow-up, incompatible Poisson data, domain
// violations, degenerate parameters.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operands living on different grids.
struct GridMismatchError : std::invalid_argument {
  explicit GridMismatchError(const std::string& msg)
      : std::invalid_argument(msg) {}
};

}  // namespace slicekit
