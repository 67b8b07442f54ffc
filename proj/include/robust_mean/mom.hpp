#pragma once

#include <cstdint>
#include <optional>

#include "robust_mean/filter.hpp"
#include "robust_mean/types.hpp"

namespace robust_mean {

struct BucketPlan {
  std::size_t k = 1;        // number of buckets
  std::size_t m = 1;        // bucket size floor(n / k)
  std::size_t dropped = 0;  // n - k m
  std::uint64_t seed = 0;
  // Permutation of 0..n-1; bucket j holds order[j m, (j + 1) m), the tail is dropped.
  IndexList order;
};

struct BucketMeans {
  PointSet means;
  BucketPlan plan;
};

// Seeded random bucketing. The permutation depends only on (seed, n), never on the values.
BucketMeans bucketize(const PointSet& points, std::size_t k, std::uint64_t seed);

struct MomConfig {
  double eps = 0.0;          // contamination fraction of the raw sample
  double tau = 0.01;         // target failure probability
  double c0 = 5.0;           // eps' = c0 (ln(1/tau)/n + eps)
  double eps_filter = 0.02;  // corruption parameter for the filter on bucket means
  double eig_tol = kDefaultEigTol;
};

// k = clamp(floor(c0 (ln(1/tau)/n + eps) n), 1, n).
std::size_t choose_k(std::size_t n, double eps, double tau, double c0);

struct MomDiagnostics {
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t dropped = 0;
  bool used_filter = false;
  std::size_t filter_iterations = 0;
  double filter_final_mass = 1.0;
  std::optional<FilterExit> filter_exit;
  // Plug-in rate using Sigma estimated as m * Sigma(w) of the bucket means.
  double theoretical_error_bound = 0.0;
};

struct MomResult {
  Vector estimate;
  MomDiagnostics diagnostics;
  std::optional<FilterTrace> trace;
};

// Median-of-means preprocessing followed by the universal filter on the bucket
// means (plain mean of bucket means when k < 3). Throws DomainError for n < 4.
MomResult mom_filter_estimate(const PointSet& points, const MomConfig& cfg, std::uint64_t seed);

}  // namespace robust_mean
