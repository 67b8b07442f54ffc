#include "robust_mean/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "robust_mean/errors.hpp"

namespace robust_mean {
namespace {

Vector distances_to(const PointSet& points, const Vector& center) {
  return (points.data().rowwise() - center.transpose()).rowwise().norm();
}

// Indices by distance descending; among equal distances the higher index comes
// first, so removing a prefix keeps lower indices on ties.
IndexList farthest_first(const Vector& dist) {
  IndexList order(static_cast<std::size_t>(dist.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = dist[static_cast<Eigen::Index>(a)];
    const double db = dist[static_cast<Eigen::Index>(b)];
    return da != db ? da > db : a > b;
  });
  return order;
}

IndexList complement(const IndexList& removed_sorted, std::size_t n) {
  IndexList kept;
  kept.reserve(n - removed_sorted.size());
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (r < removed_sorted.size() && removed_sorted[r] == i) {
      ++r;
    } else {
      kept.push_back(i);
    }
  }
  return kept;
}

}  // namespace

std::string to_string(FilterExit exit) {
  switch (exit) {
    case FilterExit::mass_threshold:
      return "mass_threshold";
    case FilterExit::zero_variance:
      return "zero_variance";
    case FilterExit::degenerate_direction:
      return "degenerate_direction";
    case FilterExit::support_exhausted:
      return "support_exhausted";
    case FilterExit::iteration_cap:
      return "iteration_cap";
  }
  return "unknown";
}

double largest_threshold(std::span<const double> scores, const WeightVector& w, double eps) {
  if (scores.size() != w.size()) {
    throw DomainError("scores and weights differ in length");
  }
  if (!(w.mass() > 0.0)) {
    throw DomainError("weights have zero mass");
  }
  for (double s : scores) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw DomainError("scores must be finite and nonnegative");
    }
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double target = eps * w.mass() * (1.0 - 1e-12);
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += w[i];
    if (cumulative >= target) {
      return scores[i];
    }
  }
  return scores[order.back()];
}

FilterResult universal_filter(const PointSet& points, const FilterConfig& cfg,
                              const FilterObserver& observer) {
  const std::size_t n = points.n();
  if (n < 2) {
    throw DomainError("universal_filter needs n >= 2");
  }
  if (!(cfg.eps > 0.0 && cfg.eps < 0.5)) {
    throw DomainError("universal_filter needs eps in (0, 1/2)");
  }
  if ((1.0 - 2.0 * cfg.eps) * static_cast<double>(n) < 1.0 - 1e-12) {
    throw DomainError("universal_filter needs (1 - 2 eps) n >= 1");
  }
  if (!(cfg.eig_tol > 0.0) || !(cfg.min_mass_guard >= 0.0)) {
    throw DomainError("universal_filter needs eig_tol > 0 and min_mass_guard >= 0");
  }
  const std::size_t cap = cfg.max_iters == 0 ? n : std::min(cfg.max_iters, n);
  const double stop_mass = 1.0 - 2.0 * cfg.eps;
  // Variance below the floating-point resolution of the coordinates counts as zero.
  const double resolution = 4.0 * std::numeric_limits<double>::epsilon() * points.data().cwiseAbs().maxCoeff();
  const double zero_variance = static_cast<double>(points.d()) * resolution * resolution;

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  std::vector<double> scores(n);
  FilterTrace trace;

  auto finish = [&](const WeightVector& weights, FilterExit exit) {
    trace.exit = exit;
    trace.final_weights = weights;
    Vector estimate = weighted_mean(points, weights);
    return FilterResult{std::move(estimate), std::move(trace)};
  };

  for (;;) {
    const WeightVector current(w);
    const Vector mu = weighted_mean(points, current);
    const Matrix cov = weighted_covariance(points, current, mu);
    const EigenPair top = top_eigenpair(cov, cfg.eig_tol);
    if (top.value <= zero_variance) {
      return finish(current, FilterExit::zero_variance);
    }

    const Vector proj = (points.data().rowwise() - mu.transpose()) * top.vector;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = proj[static_cast<Eigen::Index>(i)];
      scores[i] = p * p;
    }
    // The upper set must carry absolute weight eps, i.e. a fraction eps/mass of the current mass.
    const double t = largest_threshold(scores, current, cfg.eps / current.mass());

    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] > 0.0 && scores[i] >= t) {
        m = std::max(m, scores[i]);
      }
    }
    if (!(m > cfg.min_mass_guard * top.value)) {
      return finish(current, FilterExit::degenerate_direction);
    }
    if (trace.iterations >= cap) {
      return finish(current, FilterExit::iteration_cap);
    }

    double new_mass = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double wi = w[i];
      if (wi > 0.0 && scores[i] >= t) {
        wi = scores[i] >= m ? 0.0 : wi * (1.0 - scores[i] / m);
      }
      next[i] = wi;
      new_mass += wi;
      support += wi > 0.0 ? 1 : 0;
    }
    if (!(new_mass > 0.0)) {
      return finish(current, FilterExit::support_exhausted);
    }
    if (observer) {
      observer(w, next);
    }
    trace.steps.push_back({top.value, t, current.mass() - new_mass, support});
    ++trace.iterations;
    std::swap(w, next);
    if (new_mass < stop_mass) {
      return finish(WeightVector(w), FilterExit::mass_threshold);
    }
  }
}

Vector coordinate_median(const PointSet& points) {
  const std::size_t n = points.n();
  Vector out(static_cast<Eigen::Index>(points.d()));
  std::vector<double> column(n);
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = points.data()(static_cast<Eigen::Index>(i), j);
    }
    std::sort(column.begin(), column.end());
    out[j] = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return out;
}

PruneResult prune(const PointSet& points, double eps, double c_prune) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw DomainError("prune needs eps > 0");
  }
  if (!(c_prune > 0.0) || !std::isfinite(c_prune)) {
    throw DomainError("prune needs c_prune > 0");
  }
  const std::size_t n = points.n();
  const Vector center = coordinate_median(points);
  const Vector dist = distances_to(points, center);

  IndexList nearest(n);
  std::iota(nearest.begin(), nearest.end(), std::size_t{0});
  std::stable_sort(nearest.begin(), nearest.end(), [&](std::size_t a, std::size_t b) {
    return dist[static_cast<Eigen::Index>(a)] < dist[static_cast<Eigen::Index>(b)];
  });
  const std::size_t half = (n + 1) / 2;
  double scale2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double r = dist[static_cast<Eigen::Index>(nearest[i])];
    scale2 += r * r;
  }
  scale2 /= static_cast<double>(half);
  const double threshold = c_prune * std::sqrt(scale2 / eps);

  const std::size_t budget = std::min(n - 1, floor_count(2.0 * eps, n));
  IndexList removed;
  for (std::size_t i : farthest_first(dist)) {
    if (removed.size() == budget || !(dist[static_cast<Eigen::Index>(i)] > threshold)) {
      break;
    }
    removed.push_back(i);
  }
  std::sort(removed.begin(), removed.end());
  const IndexList kept = complement(removed, n);
  return {points.select(kept), std::move(removed)};
}

PointSet trim_to_match(const PointSet& points, double eps) {
  const std::size_t n = points.n();
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw DomainError("trim_to_match needs eps >= 0");
  }
  const std::size_t drop = floor_count(eps, n);
  if (drop >= n) {
    throw DomainError("trim_to_match needs floor(eps n) < n");
  }
  if (drop == 0) {
    return points;
  }
  const IndexList order = farthest_first(distances_to(points, coordinate_median(points)));
  IndexList removed(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(drop));
  std::sort(removed.begin(), removed.end());
  return points.select(complement(removed, n));
}

}  // namespace robust_mean
