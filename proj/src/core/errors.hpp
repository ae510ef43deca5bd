#pragma once

#include <stdexcept>
#include <string>

namespace vqns {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature could not reach the requested tolerance; carries the
// best value and the achieved error estimate.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& msg, double value, double achieved_error)
      : Error(msg), value_(value), achieved_error_(achieved_error) {}
  double value() const { return value_; }
  double achieved_error() const { return achieved_error_; }

 private:
  double value_;
  double achieved_error_;
};

// Evaluation of a 1/f spectrum at omega = 0.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class OverflowGuardError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(msg), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class AllRunsFailedError : public Error {
 public:
  using Error::Error;
};

}  // namespace vqns
