#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace dnflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidResolution : public Error {
 public:
  using Error::Error;
};

class EmptyDomain : public Error {
 public:
  using Error::Error;
};

/// A boundary regime that the domain kind (or exponent) cannot host.
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

/// Field length does not match the domain node count.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// The minimizer ran out of iterations. Carries the last iterate so callers
/// can inspect or resume.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, Eigen::VectorXd last_iterate, double residual,
                 long step = -1)
      : Error(what), last_iterate_(std::move(last_iterate)), residual_(residual), step_(step) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }
  /// Time step at which the failure happened, or -1 outside a trajectory.
  long step() const { return step_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_;
  long step_;
};

/// Neumann data that does not annihilate constants.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class SignViolation : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string key, const std::string& what)
      : Error("line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") + ": " + what),
        line_(line),
        key_(std::move(key)),
        message_(what) {}

  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::string key_;
  std::string message_;
};

}  // namespace dnflow
