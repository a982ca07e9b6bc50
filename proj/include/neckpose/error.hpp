#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neckpose {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Structural problem in a text file: headers, counts, column layout.
class FormatError : public Error {
public:
  using Error::Error;
};

/// A cell that could not be read. Carries the 1-based line.
class ParseError : public FormatError {
public:
  ParseError(std::size_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class UnitsError : public Error {
public:
  using Error::Error;
};

/// Invalid model, solver, forest or pipeline settings.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Argument outside the domain of a mathematical operation.
class DomainError : public Error {
public:
  using Error::Error;
};

class RangeOfMotionError : public Error {
public:
  using Error::Error;
};

class UnrecoverableChannelError : public Error {
public:
  using Error::Error;
};

class DegenerateChannelError : public Error {
public:
  using Error::Error;
};

class CoverageError : public Error {
public:
  using Error::Error;
};

class StratificationError : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace neckpose
