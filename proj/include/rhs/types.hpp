// SPDX-License-Identifier: Apache-2.0
//
// Common numeric aliases and error types shared across the rhs library.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhs {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

/// Thrown when an input lies outside the mathematical domain of an operation
/// (non-positive distance, out-of-bounds shape, mismatched dimensions).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Thrown when a numerical precondition fails at run time (singular system,
/// indefinite quadratic form).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Configuration or CSV syntax error. Carries the offending key and the
/// 1-based line number (0 when not tied to a line).
class ParseError : public std::runtime_error {
public:
  ParseError(std::string key, std::size_t line, const std::string &what)
      : std::runtime_error(format(key, line, what)), key_(std::move(key)),
        line_(line) {}

  const std::string &key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

private:
  static std::string format(const std::string &key, std::size_t line,
                            const std::string &what) {
    std::string msg;
    if (line > 0)
      msg += "line " + std::to_string(line) + ": ";
    if (!key.empty())
      msg += "'" + key + "': ";
    return msg + what;
  }

  std::string key_;
  std::size_t line_;
};

} // namespace rhs
