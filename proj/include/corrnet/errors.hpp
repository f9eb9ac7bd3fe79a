#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corrnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed. `line()` is 1-based, 0 when not line-specific.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Correlation (or a similar statistic) requested on a zero-variance series.
class UndefinedStatisticError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrnet
