#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cubewright {

/// Base class for everything the engine can throw.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// CSV parsing/serialization failure. `line()` is 1-based (header is line 1)
/// and 0 when the error is not tied to a specific line.
class CsvError : public Error {
public:
  explicit CsvError(const std::string& what) : Error(what) {}
  CsvError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_ = 0;
};

/// Data error raised while cleaning a table.
class CleanError : public Error {
public:
  using Error::Error;
};

/// Cube algebra error: unknown dimension, non-member value, bad operation.
class CubeError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration: cleaning spec, workspace file, cube import.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace cubewright
