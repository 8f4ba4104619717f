#pragma once

#include <stdexcept>
#include <string>

namespace satrep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or incomplete configuration (bad field value, empty table, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A numerical routine could not reach its tolerance, or an input lies
/// outside the regime the model is valid for.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// The requested geometry has no mutual visibility window.
class NoVisibilityError : public Error {
public:
  using Error::Error;
};

} // namespace satrep
