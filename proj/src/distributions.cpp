#include "robust_mean/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "robust_mean/errors.hpp"

namespace robust_mean {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// E R^p for R ~ Pareto(alpha, x_m = 1).
double pareto_raw_moment(double alpha, int p) {
  return p < alpha ? alpha / (alpha - p) : kInf;
}

double double_factorial(int k) {
  double out = 1.0;
  for (int j = k; j > 1; j -= 2) {
    out *= j;
  }
  return out;
}

// E[(sum_j w_j X_j)^k] for i.i.d. symmetric X with even moments `moments[p]`.
double weighted_sum_moment(const std::vector<double>& weights, const std::vector<double>& moments,
                           int k) {
  // sum_moments[p] = E S^p for the partial sum S, built one coordinate at a time.
  std::vector<double> sum_moments(static_cast<std::size_t>(k) + 1, 0.0);
  sum_moments[0] = 1.0;
  for (double w : weights) {
    std::vector<double> next(sum_moments.size(), 0.0);
    for (int p = 0; p <= k; ++p) {
      double binom = 1.0;
      for (int q = 0; q <= p; ++q) {
        const int r = p - q;
        if (r % 2 == 0) {
          next[static_cast<std::size_t>(p)] +=
              binom * sum_moments[static_cast<std::size_t>(q)] * std::pow(w, r) * moments[static_cast<std::size_t>(r)];
        }
        binom = binom * (p - q) / (q + 1);
      }
    }
    sum_moments = std::move(next);
  }
  return sum_moments[static_cast<std::size_t>(k)];
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::gaussian:
      return "gaussian";
    case Family::multivariate_t:
      return "multivariate_t";
    case Family::radial_pareto:
      return "radial_pareto";
    case Family::coord_pareto_sym:
      return "coord_pareto_sym";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "multivariate_t") return Family::multivariate_t;
  if (name == "radial_pareto") return Family::radial_pareto;
  if (name == "coord_pareto_sym") return Family::coord_pareto_sym;
  throw DomainError("unknown distribution family '" + name + "'");
}

void DistributionSpec::validate() const {
  if (mu.size() < 1) {
    throw DomainError("distribution dimension must be >= 1");
  }
  if (!mu.allFinite()) {
    throw DomainError("distribution mean must be finite");
  }
  if (!(cov_scale > 0.0) || !std::isfinite(cov_scale)) {
    throw DomainError("cov_scale must be positive");
  }
  if (family == Family::multivariate_t && !(nu > 2.0)) {
    throw DomainError("multivariate_t needs nu > 2 for the covariance to exist");
  }
  if ((family == Family::radial_pareto || family == Family::coord_pareto_sym) && !(alpha > 2.0)) {
    throw DomainError("pareto families need alpha > 2 for the covariance to exist");
  }
}

DistributionSpec DistributionSpec::standard(Family family, std::size_t d, double cov_scale, double shape) {
  DistributionSpec spec;
  spec.family = family;
  spec.mu = Vector::Zero(static_cast<Eigen::Index>(d));
  spec.cov_scale = cov_scale;
  if (family == Family::multivariate_t) {
    spec.nu = shape;
  } else if (family != Family::gaussian) {
    spec.alpha = shape;
  }
  return spec;
}

void draw_point(const DistributionSpec& spec, Rng& rng, std::span<double> out) {
  const std::size_t d = spec.d();
  const double sigma = std::sqrt(spec.cov_scale);
  switch (spec.family) {
    case Family::gaussian: {
      for (std::size_t j = 0; j < d; ++j) {
        out[j] = rng.normal();
      }
      break;
    }
    case Family::multivariate_t: {
      for (std::size_t j = 0; j < d; ++j) {
        out[j] = rng.normal();
      }
      // sqrt((nu-2)/nu) * z / sqrt(w/nu) = sqrt(nu-2) * z / sqrt(w), w ~ chi^2_nu.
      const double factor = std::sqrt((spec.nu - 2.0) / rng.chi_squared(spec.nu));
      for (std::size_t j = 0; j < d; ++j) {
        out[j] *= factor;
      }
      break;
    }
    case Family::radial_pareto: {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          out[j] = rng.normal();
          norm2 += out[j] * out[j];
        }
      } while (!(norm2 > 0.0));
      const double radius = std::pow(rng.uniform_open_zero(), -1.0 / spec.alpha);
      // E R^2 = alpha/(alpha-2) and E u u^T = I/d, so dividing by
      // eta = sqrt(alpha/((alpha-2) d)) gives unit coordinate variance.
      const double eta = std::sqrt(spec.alpha / ((spec.alpha - 2.0) * static_cast<double>(d)));
      const double factor = radius / (eta * std::sqrt(norm2));
      for (std::size_t j = 0; j < d; ++j) {
        out[j] *= factor;
      }
      break;
    }
    case Family::coord_pareto_sym: {
      const double scale = 1.0 / std::sqrt(spec.alpha / (spec.alpha - 2.0));
      for (std::size_t j = 0; j < d; ++j) {
        const double radius = std::pow(rng.uniform_open_zero(), -1.0 / spec.alpha);
        out[j] = (rng.coin(0.5) ? radius : -radius) * scale;
      }
      break;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = spec.mu[static_cast<Eigen::Index>(j)] + sigma * out[j];
  }
}

PointSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) {
    throw DomainError("sample size must be >= 1");
  }
  RowMatrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.d()));
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    draw_point(spec, rng, std::span<double>(data.row(static_cast<Eigen::Index>(i)).data(), spec.d()));
  }
  return PointSet(std::move(data));
}

double population_moments(const DistributionSpec& spec, int k) {
  spec.validate();
  if (k < 2 || k % 2 != 0) {
    throw DomainError("moment order k must be even and >= 2");
  }
  if (k == 2) {
    return 1.0;
  }
  const double kd = static_cast<double>(k);
  switch (spec.family) {
    case Family::gaussian:
      return std::pow(double_factorial(k - 1), 1.0 / kd);
    case Family::multivariate_t: {
      // Every projection is a scaled univariate t_nu.
      if (!(kd < spec.nu)) {
        return kInf;
      }
      const double nu = spec.nu;
      const double log_moment = 0.5 * kd * std::log(nu) + std::lgamma(0.5 * (kd + 1.0)) +
                                std::lgamma(0.5 * (nu - kd)) - 0.5 * std::log(std::numbers::pi) -
                                std::lgamma(0.5 * nu);
      const double variance = nu / (nu - 2.0);
      return std::exp(log_moment / kd) / std::sqrt(variance);
    }
    case Family::radial_pareto: {
      // Every projection has the law of R * u_1.
      const double raw = pareto_raw_moment(spec.alpha, k);
      if (!std::isfinite(raw)) {
        return kInf;
      }
      const double dd = static_cast<double>(spec.d());
      const double sphere = std::exp(std::lgamma(0.5 * dd) + std::lgamma(0.5 * (kd + 1.0)) -
                                     0.5 * std::log(std::numbers::pi) -
                                     std::lgamma(0.5 * (dd + kd)));
      const double second = pareto_raw_moment(spec.alpha, 2) / dd;
      return std::pow(raw * sphere, 1.0 / kd) / std::sqrt(second);
    }
    case Family::coord_pareto_sym: {
      if (!(kd < spec.alpha)) {
        return kInf;
      }
      // Standardized coordinate moments; odd ones vanish by symmetry.
      const double var = pareto_raw_moment(spec.alpha, 2);
      std::vector<double> moments(static_cast<std::size_t>(k) + 1, 0.0);
      for (int p = 0; p <= k; p += 2) {
        moments[static_cast<std::size_t>(p)] = pareto_raw_moment(spec.alpha, p) / std::pow(var, p / 2);
      }
      // The k-th moment of v.X is a polynomial in v; for k = 4 it equals
      // 3 + (kappa - 3) sum v_j^4, extremal at a coordinate axis or the diagonal.
      const std::size_t d = spec.d();
      std::vector<double> axis(d, 0.0);
      axis[0] = 1.0;
      const std::vector<double> diagonal(d, 1.0 / std::sqrt(static_cast<double>(d)));
      const double best = std::max(weighted_sum_moment(axis, moments, k),
                                   weighted_sum_moment(diagonal, moments, k));
      return std::pow(best, 1.0 / kd);
    }
  }
  return kInf;
}

}  // namespace robust_mean
