#pragma once

#include <stdexcept>
#include <string>

namespace tensorformer {

#ifdef TENSORFORMER_REAL_F32
using real_t = float;
#else
using real_t = double;
#endif

// Raised when tensor shapes or dimension chains do not line up.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on malformed configs, unknown keys, or invalid parameter values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a file cannot be read, parsed, or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a numeric contract is violated at runtime (degenerate
// denominator in strict mode, NaN loss, non-binary grid input, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tensorformer
