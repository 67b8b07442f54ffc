#include "robust_mean/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "robust_mean/errors.hpp"
#include "robust_mean/filter.hpp"

namespace robust_mean {

Vector empirical_mean(const PointSet& points) { return points.data().colwise().mean().transpose(); }

Vector coord_median(const PointSet& points) { return coordinate_median(points); }

Vector geometric_median(const PointSet& points, double tol, int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) {
    throw DomainError("geometric_median needs tol > 0 and max_iter >= 1");
  }
  const RowMatrix& x = points.data();
  const double spread = std::max(x.cwiseAbs().maxCoeff(), 1.0);
  const double floor_dist = 1e-12 * spread;
  Vector y = empirical_mean(points);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd inv = (x.rowwise() - y.transpose()).rowwise().norm().cwiseMax(floor_dist).cwiseInverse();
    const Vector next = (x.transpose() * inv) / inv.sum();
    const double step = (next - y).norm();
    y = next;
    if (step <= tol * (1.0 + y.norm())) {
      break;
    }
  }
  return y;
}

}  // namespace robust_mean
