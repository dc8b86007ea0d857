#pragma once

#include <stdexcept>
#include <string>

namespace spectral_risk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV, JSON). Carries the 1-based line when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by the caller.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input for which the requested quantity is undefined (zero matrix, zero variance).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration budget.
class IterationLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace spectral_risk
