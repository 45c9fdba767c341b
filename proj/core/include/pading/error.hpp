#pragma once

#include <stdexcept>
#include <string>

namespace pading {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix/tensor shape mismatch. Messages name both shapes.
struct DimensionError : Error {
  using Error::Error;
};

// Invalid argument value (non-positive temperature, bad bandwidth, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Malformed input file; messages carry the offending line/row.
struct ParseError : Error {
  using Error::Error;
};

// A requested name/label could not be resolved.
struct LookupError : Error {
  using Error::Error;
};

// A dataset or batch violates a documented invariant.
struct ValidationError : Error {
  using Error::Error;
};

// Degenerate numeric input (near-zero row where a direction is required,
// batch with no eligible pairs, ...).
struct DegenerateInputError : Error {
  using Error::Error;
};

// Optimizer/training state misuse (e.g. stepping with unpopulated gradients).
struct StateError : Error {
  using Error::Error;
};

// Gradient or determinism verification failed.
struct VerificationError : Error {
  using Error::Error;
};

// Training produced a non-finite loss.
struct DivergenceError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace pading
