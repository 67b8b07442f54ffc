#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "robust_mean/linalg.hpp"
#include "robust_mean/types.hpp"

namespace robust_mean {

struct FilterConfig {
  double eps = 0.1;
  double eig_tol = kDefaultEigTol;  // relative, so the filter is scale-equivariant
  std::size_t max_iters = 0;        // 0 means n (the hard bound)
  double min_mass_guard = 1e-12;
};

enum class FilterExit {
  mass_threshold,      // ||w||_1 dropped below 1 - 2 eps
  zero_variance,       // top eigenvalue is zero: nothing left to filter
  degenerate_direction,  // max score below min_mass_guard * lambda
  support_exhausted,   // a step would have zeroed every weight
  iteration_cap,       // cfg.max_iters reached
};

std::string to_string(FilterExit exit);

struct FilterStep {
  double lambda = 0.0;
  double threshold = 0.0;
  double mass_removed = 0.0;
  std::size_t support_size = 0;  // after the step
};

struct FilterTrace {
  std::vector<FilterStep> steps;
  WeightVector final_weights = WeightVector({1.0});
  std::size_t iterations = 0;
  FilterExit exit = FilterExit::mass_threshold;
};

struct FilterResult {
  Vector estimate;
  FilterTrace trace;
};

// Called after every down-weighting step with the weights before and after it.
using FilterObserver = std::function<void(std::span<const double> before, std::span<const double> after)>;

// Largest score t whose upper set {i : score_i >= t} carries at least eps * mass.
// Scanning order is score descending with lower index first on ties.
double largest_threshold(std::span<const double> scores, const WeightVector& w, double eps);

/// Weighted universal filter with unknown variance scale.
///
/// Starts from uniform weights 1/n and repeats: weighted mean mu(w) and covariance
/// Sigma(w), top eigenvector v of Sigma(w), scores g = (v.(x - mu(w)))^2, threshold t
/// so that the points with g >= t carry weight eps, f = g on those points (0 elsewhere),
/// m = max f over the support, w <- w (1 - f/m) with the argmax set exactly to zero.
/// Returns mu(w) once ||w||_1 < 1 - 2 eps. Terminates within n down-weighting steps.
///
/// Throws DomainError unless n >= 2, 0 < eps < 1/2 and (1 - 2 eps) n >= 1.
FilterResult universal_filter(const PointSet& points, const FilterConfig& cfg,
                              const FilterObserver& observer = {});

struct PruneResult {
  PointSet kept;
  IndexList removed;  // ascending
};

// Removes points farther than c_prune * sqrt(scale^2 / eps) from the coordinate-wise
// median, where scale^2 is the trace of the second moment (about the median) of the
// ceil(n/2) nearest points. At most floor(2 eps n) points go; if more qualify the
// farthest are removed.
PruneResult prune(const PointSet& points, double eps, double c_prune);

// Drops the floor(eps n) points farthest from the coordinate-wise median
// (ties: lower index kept); the rest keep their order.
PointSet trim_to_match(const PointSet& points, double eps);

Vector coordinate_median(const PointSet& points);

}  // namespace robust_mean
