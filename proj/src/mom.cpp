#include "robust_mean/mom.hpp"

#include <algorithm>
#include <cmath>

#include "robust_mean/errors.hpp"
#include "robust_mean/linalg.hpp"
#include "robust_mean/rng.hpp"
#include "robust_mean/stability.hpp"

namespace robust_mean {

BucketMeans bucketize(const PointSet& points, std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.n();
  if (k < 1 || k > n) {
    throw DomainError("bucketize needs 1 <= k <= n");
  }
  BucketPlan plan;
  plan.k = k;
  plan.m = n / k;
  plan.dropped = n - k * plan.m;
  plan.seed = seed;
  plan.order = random_permutation(n, seed);

  RowMatrix means(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(points.d()));
  for (std::size_t b = 0; b < k; ++b) {
    auto row = means.row(static_cast<Eigen::Index>(b));
    row.setZero();
    for (std::size_t j = 0; j < plan.m; ++j) {
      row += points.row(plan.order[b * plan.m + j]);
    }
    row /= static_cast<double>(plan.m);
  }
  return {PointSet(std::move(means)), std::move(plan)};
}

std::size_t choose_k(std::size_t n, double eps, double tau, double c0) {
  if (n < 1) {
    throw DomainError("choose_k needs n >= 1");
  }
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw DomainError("choose_k needs eps in [0, 1/2)");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("choose_k needs tau in (0, 1)");
  }
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw DomainError("choose_k needs c0 > 0");
  }
  const double nd = static_cast<double>(n);
  const double eps_prime = c0 * (std::log(1.0 / tau) / nd + eps);
  const std::size_t k = floor_count(eps_prime, n);
  return std::clamp<std::size_t>(k, 1, n);
}

MomResult mom_filter_estimate(const PointSet& points, const MomConfig& cfg, std::uint64_t seed) {
  const std::size_t n = points.n();
  if (n < 4) {
    throw DomainError("mom_filter_estimate needs n >= 4");
  }
  if (!(cfg.eps_filter > 0.0 && cfg.eps_filter < 0.5)) {
    throw DomainError("eps_filter must lie in (0, 1/2)");
  }
  const std::size_t k = choose_k(n, cfg.eps, cfg.tau, cfg.c0);
  BucketMeans buckets = bucketize(points, k, seed);

  MomResult result;
  MomDiagnostics& diag = result.diagnostics;
  diag.k = k;
  diag.m = buckets.plan.m;
  diag.dropped = buckets.plan.dropped;

  Matrix bucket_cov;
  if (k < 3) {
    const WeightVector uniform = WeightVector::uniform(k);
    result.estimate = weighted_mean(buckets.means, uniform);
    bucket_cov = weighted_covariance(buckets.means, uniform, result.estimate);
  } else {
    FilterConfig fcfg;
    fcfg.eps = cfg.eps_filter;
    fcfg.eig_tol = cfg.eig_tol;
    FilterResult filtered = universal_filter(buckets.means, fcfg);
    diag.used_filter = true;
    diag.filter_iterations = filtered.trace.iterations;
    diag.filter_final_mass = filtered.trace.final_weights.mass();
    diag.filter_exit = filtered.trace.exit;
    bucket_cov = weighted_covariance(buckets.means, filtered.trace.final_weights, filtered.estimate);
    result.estimate = std::move(filtered.estimate);
    result.trace = std::move(filtered.trace);
  }

  // A bucket mean of m i.i.d. points has covariance Sigma / m.
  const Matrix sigma_hat = static_cast<double>(diag.m) * bucket_cov;
  RateInputs rate;
  rate.n = static_cast<double>(n);
  rate.trace_sigma = std::max(sigma_hat.trace(), 0.0);
  rate.norm_sigma = rate.trace_sigma > 0.0 ? std::min(max_eigenvalue(sigma_hat), rate.trace_sigma) : 0.0;
  rate.eps = cfg.eps;
  rate.tau = cfg.tau;
  rate.d = points.d();
  diag.theoretical_error_bound = theoretical_error_bound(rate);
  return result;
}

}  // namespace robust_mean
