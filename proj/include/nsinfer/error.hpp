#pragma once

#include <stdexcept>
#include <string>

namespace nsinfer {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch, non-square or asymmetric input.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Factorization breakdown or non-finite intermediate.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input for which the test statistic is undefined (zero response, zero
/// group column).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// An estimator's optimization did not produce a usable solution. Carries the
/// LP status name and, for column-wise fits, the failing column.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& what, std::string lp_status, int column = -1)
      : Error(what), lp_status_(std::move(lp_status)), column_(column) {}

  const std::string& lp_status() const noexcept { return lp_status_; }
  int column() const noexcept { return column_; }

 private:
  std::string lp_status_;
  int column_;
};

/// A Monte Carlo cell produced no usable replication.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsinfer
