#pragma once

#include <stdexcept>
#include <string>

namespace ratebias {

/// Base for every error caused by the data or the configuration rather than by
/// a bug. The CLI maps these to exit code 2 (data) or 1 (config).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownBusinessError : public Error {
 public:
  using Error::Error;
};

class DegeneratePopulationError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class SingularDesignError : public Error {
 public:
  SingularDesignError(const std::string& column)
      : Error("design matrix is rank deficient at column '" + column + "'"),
        column_(column) {}

  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class EmptyUniverseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ratebias
