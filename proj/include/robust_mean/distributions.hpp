#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "robust_mean/rng.hpp"
#include "robust_mean/types.hpp"

namespace robust_mean {

enum class Family { gaussian, multivariate_t, radial_pareto, coord_pareto_sym };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// Inlier law with mean mu and covariance exactly cov_scale * I.
//   gaussian          N(mu, cov_scale I)
//   multivariate_t    Student-t with nu > 2 degrees of freedom, rescaled to unit covariance
//   radial_pareto     R u, R ~ Pareto(alpha) with x_m = 1, u uniform on the sphere
//   coord_pareto_sym  i.i.d. coordinates +-R, R ~ Pareto(alpha)
struct DistributionSpec {
  Family family = Family::gaussian;
  Vector mu;  // length d
  double cov_scale = 1.0;
  double nu = 0.0;     // multivariate_t only
  double alpha = 0.0;  // pareto families only

  std::size_t d() const { return static_cast<std::size_t>(mu.size()); }
  void validate() const;

  // Zero mean; `shape` is nu for multivariate_t and alpha for the pareto families.
  static DistributionSpec standard(Family family, std::size_t d, double cov_scale = 1.0, double shape = 0.0);
};

PointSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

// One draw written into out (length d). sample() is n sequential calls of this.
void draw_point(const DistributionSpec& spec, Rng& rng, std::span<double> out);

// sigma_k: sup over unit v of E[(v.(X-mu))^k]^(1/k) / E[(v.(X-mu))^2]^(1/2).
// Infinite when the k-th moment does not exist. k must be even and >= 2.
double population_moments(const DistributionSpec& spec, int k);

}  // namespace robust_mean
