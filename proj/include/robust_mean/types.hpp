#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace robust_mean {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// One point per row, so a point's coordinates are contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexList = std::vector<std::size_t>;

// n x d sample. Every entry is finite, n >= 1 and d >= 1.
class PointSet {
 public:
  explicit PointSet(RowMatrix data);

  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t n() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(data_.cols()); }

  const RowMatrix& data() const { return data_; }
  auto row(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }

  // Rows in the given order (indices may repeat).
  PointSet select(std::span<const std::size_t> indices) const;

  PointSet translated(const Vector& shift) const;
  PointSet scaled(double factor) const;

 private:
  RowMatrix data_;
};

// Nonnegative weights with a cached total mass.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> values);

  static WeightVector uniform(std::size_t n);

  std::size_t size() const { return values_.size(); }
  double mass() const { return mass_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  // Membership in the capped simplex: mass 1 and every w_i <= 1/((1-eps)n), up to tol.
  bool in_capped_simplex(double eps, double tol = 1e-9) const;

 private:
  std::vector<double> values_;
  double mass_ = 0.0;
};

// floor(x * n) and ceil(x * n) with a 1e-9 guard so that e.g. 0.1 * 10 counts as 1, not 0.
std::size_t floor_count(double fraction, std::size_t n);
std::size_t ceil_count(double fraction, std::size_t n);

}  // namespace robust_mean
