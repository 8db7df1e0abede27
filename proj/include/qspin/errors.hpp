#pragma once

#include <stdexcept>
#include <string>

namespace qspin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// Operand dimensions do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension"; }
};

/// A Hilbert-space dimension exceeds the configured cap.
class ResourceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "resource"; }
};

/// An iterative or dense solver failed. Carries the last residual seen.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  explicit SolverError(const std::string& what) : SolverError(what, 0.0) {}
  const char* kind() const noexcept override { return "solver"; }
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Exponentials would overflow (beta * ||H|| beyond the range limit).
class RangeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "range"; }
};

/// Inputs sit on a removable singularity (e.g. a vanishing expectation).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_input"; }
};

/// The operation is not defined for this kind of input.
class UnsupportedError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported"; }
};

/// A run specification failed to parse or validate.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  const char* kind() const noexcept override { return "parse"; }
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace qspin
