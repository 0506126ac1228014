#pragma once

#include <stdexcept>
#include <string>

namespace dare {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not match (non-square input, mismatched n).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A factor that must be inverted is numerically singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A dense eigen/SVD routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Iterates became non-finite or exceeded the overflow guard.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The Stein equation has no unique solution for the given coefficient.
class NoUniqueSolutionError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A self-check that should hold by construction did not.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem file; `location()` is a JSON-pointer-style path.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, const std::string& location, const std::string& what)
      : Error(path + ": " + (location.empty() ? std::string() : location + ": ") + what),
        path_(path),
        location_(location) {}

  const std::string& path() const { return path_; }
  const std::string& location() const { return location_; }

 private:
  std::string path_;
  std::string location_;
};

}  // namespace dare
