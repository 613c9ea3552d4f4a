#pragma once

#include <stdexcept>
#include <string>

namespace gcfl {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed spec-file or expression text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Well-formed input that violates a declared constraint (e.g. torus with b >= a).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Evaluation outside a function's domain: off-surface points, log of a
// nonpositive argument, points outside a curve's interval.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A formula or equation is singular at the requested point.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& message, double location)
      : Error(message), location_(location) {}

  double location() const { return location_; }

 private:
  double location_;
};

// Iterative procedure (projection, step-size control) failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcfl
