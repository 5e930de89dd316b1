#pragma once

#include <stdexcept>
#include <string>

namespace ppinfer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid distribution or algorithm parameter (non-positive shape, p outside (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration: mismatched horizons, impossible calibration requests.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-range observations.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to converge or produced a non-finite result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the support of an operation (model index beyond Nmax, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Programming error: a caller violated a documented precondition.
class LogicError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written; carries the OS message.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppinfer
