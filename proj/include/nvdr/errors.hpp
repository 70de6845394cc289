#pragma once

#include <stdexcept>

namespace nvdr {

// invalid specs, parameters, malformed configs or files; CLI exit code 1
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// numerics out of contract (non-hermitian input, failed sweep point); CLI exit code 2
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nvdr
