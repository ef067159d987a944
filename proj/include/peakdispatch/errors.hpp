#pragma once

#include <stdexcept>
#include <string>

namespace peakdispatch {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Data and calendar errors.
class ParseError : public Error {
 public:
  using Error::Error;
};
class GapError : public Error {
 public:
  using Error::Error;
};
class UnitError : public Error {
 public:
  using Error::Error;
};
class SpecError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Model-fitting errors.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};
class SingularCovError : public Error {
 public:
  using Error::Error;
};
class ModelMismatchError : public Error {
 public:
  using Error::Error;
};
class EmptyScenarioError : public Error {
 public:
  using Error::Error;
};
class NoDataError : public Error {
 public:
  using Error::Error;
};
class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

// Optimization errors.
class DimensionError : public Error {
 public:
  using Error::Error;
};
class InfeasibleBoundsError : public Error {
 public:
  using Error::Error;
};
class InfeasibleScheduleError : public Error {
 public:
  using Error::Error;
};
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Settlement and pipeline errors.
class InsufficientHistoryError : public Error {
 public:
  using Error::Error;
};
class OutOfOrderError : public Error {
 public:
  using Error::Error;
};
class IncompleteSeasonError : public Error {
 public:
  using Error::Error;
};
class LookAheadError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace peakdispatch
