#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace robust_mean {

// Precondition or domain violation (bad eps, zero mass, non-finite data, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input too large for an exhaustive routine.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Iterative kernel ran out of iterations. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_value, Eigen::VectorXd last_vector)
      : std::runtime_error(what), last_value_(last_value), last_vector_(std::move(last_vector)) {}

  double last_value() const { return last_value_; }
  const Eigen::VectorXd& last_vector() const { return last_vector_; }

 private:
  double last_value_;
  Eigen::VectorXd last_vector_;
};

// Malformed input file. Row and column are 1-based; column 0 means "whole row".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what), row_(row), column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace robust_mean
