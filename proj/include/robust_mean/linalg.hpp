#pragma once

#include "robust_mean/types.hpp"

namespace robust_mean {

// (sum_i w_i x_i) / mass. Throws DomainError on zero mass.
Vector weighted_mean(const PointSet& points, const WeightVector& w);

// (sum_i w_i (x_i - c)(x_i - c)^T) / mass.
Matrix weighted_covariance(const PointSet& points, const WeightVector& w, const Vector& center);

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
};

inline constexpr double kDefaultEigTol = 1e-8;
inline constexpr int kDefaultEigMaxIter = 10'000;

/// Dominant eigenpair of a symmetric PSD matrix by power iteration.
///
/// Starts from the normalized all-ones vector. A converged pair is accepted only
/// if (lambda + slack) I - M is positive definite; otherwise the start was
/// (numerically) orthogonal to the top eigenspace and the iteration restarts
/// from e_1, e_2, ... in turn. On return
///   ||M v - lambda v|| <= tol * max(lambda, trace(M) / d),  ||v|| = 1,
/// and the largest-magnitude coordinate of v is positive (lowest index on ties).
///
/// Throws DomainError for non-finite, non-square or asymmetric input and
/// ConvergenceError (carrying the last iterate) after max_iter steps.
EigenPair top_eigenpair(const Matrix& m, double tol = kDefaultEigTol,
                        int max_iter = kDefaultEigMaxIter);

// Largest and smallest eigenvalue of a symmetric PSD matrix, both via
// top_eigenpair (the smallest through the shift trace(M) I - M).
double max_eigenvalue(const Matrix& m, double tol = kDefaultEigTol);
double min_eigenvalue(const Matrix& m, double tol = kDefaultEigTol);

// ||sigma - target * I||_2 for symmetric PSD sigma.
double deviation_from_scaled_identity(const Matrix& sigma, double target,
                                      double tol = kDefaultEigTol);

}  // namespace robust_mean
