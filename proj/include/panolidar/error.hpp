#pragma once

#include <stdexcept>
#include <string>

namespace panolidar {

/// Base for every error raised by the library. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FileNotFound : public Error {
 public:
  using Error::Error;
};

/// Input does not match its declared format (wrong header, arity, or binary payload).
class FormatMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegeneratePoint : public Error {
 public:
  using Error::Error;
};

class BadWidth : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class FixtureParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace panolidar
