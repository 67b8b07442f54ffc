#include "robust_mean/types.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "robust_mean/errors.hpp"

namespace robust_mean {

PointSet::PointSet(RowMatrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw DomainError("point set needs n >= 1 and d >= 1");
  }
  if (!data_.allFinite()) {
    throw DomainError("point set contains non-finite entries");
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw DomainError("point set needs n >= 1 and d >= 1");
  }
  const auto d = rows.front().size();
  RowMatrix data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw DomainError("ragged rows: row " + std::to_string(i) + " has " +
                        std::to_string(rows[i].size()) + " values, expected " + std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return PointSet(std::move(data));
}

PointSet PointSet::select(std::span<const std::size_t> indices) const {
  if (indices.empty()) {
    throw DomainError("cannot select an empty point set");
  }
  RowMatrix out(static_cast<Eigen::Index>(indices.size()), data_.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= n()) {
      throw DomainError("row index out of range");
    }
    out.row(static_cast<Eigen::Index>(i)) = data_.row(static_cast<Eigen::Index>(indices[i]));
  }
  return PointSet(std::move(out));
}

PointSet PointSet::translated(const Vector& shift) const {
  if (static_cast<std::size_t>(shift.size()) != d()) {
    throw DomainError("shift dimension mismatch");
  }
  RowMatrix out = data_.rowwise() + shift.transpose();
  return PointSet(std::move(out));
}

PointSet PointSet::scaled(double factor) const { return PointSet(data_ * factor); }

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
  for (double w : values_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DomainError("weights must be finite and nonnegative");
    }
  }
  mass_ = std::accumulate(values_.begin(), values_.end(), 0.0);
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) {
    throw DomainError("uniform weights need n >= 1");
  }
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

bool WeightVector::in_capped_simplex(double eps, double tol) const {
  if (values_.empty() || std::abs(mass_ - 1.0) > tol) {
    return false;
  }
  const double cap = 1.0 / ((1.0 - eps) * static_cast<double>(values_.size()));
  for (double w : values_) {
    if (w > cap + tol) {
      return false;
    }
  }
  return true;
}

std::size_t floor_count(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  if (x <= 0.0) {
    return 0;
  }
  return static_cast<std::size_t>(std::floor(x + 1e-9));
}

std::size_t ceil_count(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  if (x <= 0.0) {
    return 0;
  }
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

}  // namespace robust_mean
