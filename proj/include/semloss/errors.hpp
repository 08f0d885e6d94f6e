#pragma once

#include <stdexcept>
#include <string>

namespace semloss {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or dimension mismatch between tensors.
struct ShapeError : Error {
  using Error::Error;
};

// A caller violated a documented precondition.
struct ContractError : Error {
  using Error::Error;
};

// Malformed input file; message carries the line number where known.
struct ParseError : Error {
  using Error::Error;
};

// Invalid configuration value or unknown key.
struct ConfigError : Error {
  using Error::Error;
};

// Training produced NaN or a runaway loss; carries step/parameter context.
struct DivergenceError : Error {
  using Error::Error;
};

// Degenerate sampling distribution.
struct SamplingError : Error {
  using Error::Error;
};

// Checkpoint and corpus vocabularies do not match.
struct IncompatibilityError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace semloss
