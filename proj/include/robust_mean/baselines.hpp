#pragma once

#include "robust_mean/types.hpp"

namespace robust_mean {

Vector empirical_mean(const PointSet& points);

// Coordinate-wise median; even n takes the midpoint of the two middle values.
Vector coord_median(const PointSet& points);

// Weiszfeld iteration from the empirical mean with distances floored at a tiny
// regularizer, stopped when a step moves less than tol * (1 + ||y||).
Vector geometric_median(const PointSet& points, double tol = 1e-8, int max_iter = 10'000);

}  // namespace robust_mean
