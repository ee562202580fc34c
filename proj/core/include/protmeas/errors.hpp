#pragma once

#include <stdexcept>
#include <string>

namespace protmeas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violates a documented bound (grid fit, degeneracy, T <= 0, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A computed quantity failed a consistency check (imaginary expectation, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The requested problem exceeds a configured size cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Pointer probability reached the periodic window boundary in strict mode.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

}  // namespace protmeas
