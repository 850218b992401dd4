#pragma once

#include <stdexcept>
#include <string>

namespace motioneval {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid option, flag combination or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data violates a precondition (too short, non-finite, empty, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (npy header, CSV schema, checkpoint layout).
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// Tensor or vector dimensions disagree with what an operation requires.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

// A multimodal sequence does not fit into the model's context window.
class LengthError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Every contrastive sample in a batch has zero weight.
class DegenerateBatchError : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

// Pearson correlation of a constant series.
class UndefinedCorrelation : public DataError {
 public:
  using DataError::DataError;
};

} // namespace motioneval
