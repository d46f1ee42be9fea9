#pragma once

#include <stdexcept>
#include <string>

namespace driftgp {

/// Root of every library error; callers that only report can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Regularised Gram matrix stayed indefinite through the whole jitter ladder.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

/// C Sigma C^T + sigma_y^2 I is not invertible (sigma_y = 0 with degenerate Sigma).
class SingularInnovation : public Error {
 public:
  using Error::Error;
};

class MissionAborted : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Every grid point of the truth field is below the speed mask.
class DegenerateTruth : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace driftgp
