#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace afp {

/// Root of every fault raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid problem text.
///
/// Syntax errors carry a 1-based line/column; semantic errors carry the
/// offending key (line/column then point at the value).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string key, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& key() const noexcept { return key_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string key_;
  std::string detail_;
};

/// Arithmetic failure while evaluating an expression (division by zero,
/// non-finite result).
class EvalError : public Error {
 public:
  EvalError(const std::string& message, double at)
      : Error(message), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

/// A point is outside the declared domain, a grid is empty, or a point cap
/// was exceeded.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A point that no branch of a piecewise map accepts.
class UnmatchedPointError : public DomainError {
 public:
  UnmatchedPointError(const std::string& message, double x)
      : DomainError(message), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// An orbit left the cyclic domain; `iterate` is the index of the first
/// offending point.
class OrbitError : public DomainError {
 public:
  OrbitError(const std::string& message, std::size_t iterate, double x)
      : DomainError(message), iterate_(iterate), x_(x) {}
  std::size_t iterate() const noexcept { return iterate_; }
  double x() const noexcept { return x_; }

 private:
  std::size_t iterate_;
  double x_;
};

/// Parameter outside the admissible range of an operator class or solver.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Operation is not defined for the requested operator class.
class UnsupportedClassError : public Error {
 public:
  using Error::Error;
};

}  // namespace afp
