#include "robust_mean/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "robust_mean/baselines.hpp"
#include "robust_mean/errors.hpp"
#include "robust_mean/filter.hpp"
#include "robust_mean/json_io.hpp"
#include "robust_mean/mom.hpp"
#include "robust_mean/rng.hpp"

namespace robust_mean {
namespace {

// Purposes of the per-trial sub-streams.
constexpr std::uint64_t kStreamSample = 1;
constexpr std::uint64_t kStreamAttack = 2;
constexpr std::uint64_t kStreamMom = 3;

Vector run_estimator(EstimatorKind kind, const PointSet& points, const Cell& cell,
                     const ExperimentConfig& cfg, std::uint64_t seed) {
  switch (kind) {
    case EstimatorKind::empirical_mean:
      return empirical_mean(points);
    case EstimatorKind::coord_median:
      return coord_median(points);
    case EstimatorKind::geometric_median:
      return geometric_median(points);
    case EstimatorKind::filter: {
      FilterConfig fcfg;
      fcfg.eps = cell.eps;
      fcfg.eig_tol = cfg.filter.eig_tol;
      if (cfg.filter.prune) {
        return universal_filter(prune(points, cell.eps, cfg.filter.c_prune).kept, fcfg).estimate;
      }
      return universal_filter(points, fcfg).estimate;
    }
    case EstimatorKind::mom_filter: {
      MomConfig mcfg;
      mcfg.eps = cell.eps;
      mcfg.tau = cell.tau;
      mcfg.c0 = cfg.mom.c0;
      mcfg.eps_filter = cfg.mom.eps_filter;
      mcfg.eig_tol = cfg.filter.eig_tol;
      return mom_filter_estimate(points, mcfg, seed).estimate;
    }
  }
  throw DomainError("unknown estimator");
}

ContaminatedSample draw_cell_sample(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed) {
  const DistributionSpec dist = cfg.distribution.instantiate(cell.d);
  const AttackSpec attack = cfg.attack.instantiate(cell.d, cell.eps);
  if (attack.kind == AttackKind::huber_additive) {
    const Vector u = attack.direction ? attack.direction->normalized() : Vector(Vector::Unit(static_cast<Eigen::Index>(cell.d), 0));
    const PointMass noise{dist.mu + std::sqrt(dist.cov_scale) * attack.resolved_magnitude() * u};
    return attack_huber(dist, noise, cell.eps, cell.n, mix_seed(seed, kStreamAttack));
  }
  const PointSet clean = sample(dist, cell.n, mix_seed(seed, kStreamSample));
  return attack_strong(clean, attack, mix_seed(seed, kStreamAttack), dist.mu);
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::empirical_mean:
      return "empirical_mean";
    case EstimatorKind::coord_median:
      return "coord_median";
    case EstimatorKind::geometric_median:
      return "geometric_median";
    case EstimatorKind::filter:
      return "filter";
    case EstimatorKind::mom_filter:
      return "mom_filter";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(const std::string& name) {
  if (name == "empirical_mean") return EstimatorKind::empirical_mean;
  if (name == "coord_median") return EstimatorKind::coord_median;
  if (name == "geometric_median") return EstimatorKind::geometric_median;
  if (name == "filter") return EstimatorKind::filter;
  if (name == "mom_filter") return EstimatorKind::mom_filter;
  throw DomainError("unknown estimator '" + name + "'");
}

DistributionSpec DistributionTemplate::instantiate(std::size_t d) const {
  DistributionSpec spec;
  spec.family = family;
  spec.cov_scale = cov_scale;
  spec.nu = nu;
  spec.alpha = alpha;
  if (mu) {
    if (mu->size() != d) {
      throw DomainError("distribution mu has length " + std::to_string(mu->size()) +
                        " but the grid asks for d = " + std::to_string(d));
    }
    spec.mu = Eigen::Map<const Vector>(mu->data(), static_cast<Eigen::Index>(d));
  } else {
    spec.mu = Vector::Constant(static_cast<Eigen::Index>(d), mu_fill);
  }
  spec.validate();
  return spec;
}

AttackSpec AttackTemplate::instantiate(std::size_t d, double eps) const {
  AttackSpec spec;
  spec.kind = kind;
  spec.eps = eps;
  spec.magnitude = magnitude;
  switch (direction_mode) {
    case DirectionMode::auto_top:
      break;
    case DirectionMode::first_axis:
      spec.direction = Vector::Unit(static_cast<Eigen::Index>(d), 0);
      break;
    case DirectionMode::explicit_vector:
      if (direction.size() != d) {
        throw DomainError("attack direction length does not match d");
      }
      spec.direction = Eigen::Map<const Vector>(direction.data(), static_cast<Eigen::Index>(d));
      break;
  }
  spec.validate();
  return spec;
}

void ExperimentConfig::validate() const {
  if (trials < 1) {
    throw DomainError("experiment needs trials >= 1");
  }
  if (estimators.empty()) {
    throw DomainError("experiment needs at least one estimator");
  }
  if (grid.n.empty() || grid.d.empty() || grid.eps.empty() || grid.tau.empty()) {
    throw DomainError("every grid axis needs at least one value");
  }
  for (std::size_t n : grid.n) {
    if (n < 1) throw DomainError("grid n values must be >= 1");
  }
  for (std::size_t d : grid.d) {
    if (d < 1) throw DomainError("grid d values must be >= 1");
    (void)distribution.instantiate(d);
  }
  for (double eps : grid.eps) {
    if (!(eps >= 0.0 && eps < 0.5)) throw DomainError("grid eps values must lie in [0, 1/2)");
  }
  for (double tau : grid.tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("grid tau values must lie in (0, 1)");
  }
  if (!(filter.eig_tol > 0.0) || !(filter.c_prune > 0.0)) {
    throw DomainError("filter settings need eig_tol > 0 and c_prune > 0");
  }
  if (!(mom.c0 > 0.0) || !(mom.eps_filter > 0.0 && mom.eps_filter < 0.5)) {
    throw DomainError("mom settings need c0 > 0 and eps_filter in (0, 1/2)");
  }
}

std::vector<Cell> enumerate_cells(const GridSpec& grid) {
  std::vector<Cell> cells;
  for (std::size_t n : grid.n) {
    for (std::size_t d : grid.d) {
      for (double eps : grid.eps) {
        for (double tau : grid.tau) {
          cells.push_back({cells.size(), n, d, eps, tau});
        }
      }
    }
  }
  return cells;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t cell_index, std::size_t trial_index) {
  return mix_seed(master_seed, cell_index, trial_index);
}

std::vector<TrialOutcome> run_trial(const ExperimentConfig& cfg, const Cell& cell, std::size_t trial_index) {
  const std::uint64_t seed = trial_seed(cfg.master_seed, cell.index, trial_index);
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(cfg.estimators.size());

  std::optional<ContaminatedSample> data;
  std::string sample_failure;
  try {
    data = draw_cell_sample(cfg, cell, seed);
  } catch (const std::exception& e) {
    sample_failure = std::string("sampling failed: ") + e.what();
  }

  for (EstimatorKind kind : cfg.estimators) {
    TrialOutcome outcome;
    outcome.estimator = kind;
    if (!data) {
      outcome.failure = sample_failure;
    } else {
      try {
        const Vector estimate = run_estimator(kind, data->points, cell, cfg, mix_seed(seed, kStreamMom));
        const double error = (estimate - data->clean_mean).norm();
        if (std::isfinite(error)) {
          outcome.error = error;
        } else {
          outcome.failure = "non-finite estimate";
        }
      } catch (const std::exception& e) {
        outcome.failure = e.what();
      }
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

const EstimatorSummary& CellReport::summary(EstimatorKind kind) const {
  for (const auto& s : estimators) {
    if (s.estimator == kind) {
      return s;
    }
  }
  throw DomainError("estimator '" + to_string(kind) + "' not in report");
}

double nearest_rank_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw DomainError("quantile of empty data");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("quantile level must lie in (0, 1]");
  }
  const std::size_t rank = std::max<std::size_t>(ceil_count(q, sorted.size()), 1);
  return sorted[rank - 1];
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t workers) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Cell> cells = enumerate_cells(cfg.grid);
  const std::size_t total = cells.size() * cfg.trials;

  std::vector<std::vector<TrialOutcome>> results(total);
  std::vector<double> durations(total, 0.0);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t item = next++; item < total; item = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      results[item] = run_trial(cfg, cells[item / cfg.trials], item % cfg.trials);
      durations[item] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = std::min(workers, std::max<std::size_t>(total, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) {
      pool.emplace_back(work);
    }
  }

  ExperimentReport report;
  report.config_hash = config_hash(cfg);
  report.master_seed = cfg.master_seed;
  report.keep_errors = cfg.keep_errors;
  for (const Cell& cell : cells) {
    CellReport cr;
    cr.cell = cell;
    const DistributionSpec dist = cfg.distribution.instantiate(cell.d);
    RateInputs rate;
    rate.n = static_cast<double>(cell.n);
    rate.trace_sigma = static_cast<double>(cell.d) * dist.cov_scale;
    rate.norm_sigma = dist.cov_scale;
    rate.eps = cell.eps;
    rate.tau = cell.tau;
    rate.d = cell.d;
    cr.theoretical_bound = theoretical_error_bound(rate, cfg.bound_constants);

    double cell_time = 0.0;
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      EstimatorSummary s;
      s.estimator = cfg.estimators[e];
      s.trials = cfg.trials;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const TrialOutcome& outcome = results[cell.index * cfg.trials + t][e];
        if (outcome.error) {
          s.errors.push_back(*outcome.error);
        } else {
          ++s.failures;
        }
      }
      std::sort(s.errors.begin(), s.errors.end());
      if (!s.errors.empty()) {
        s.q50 = nearest_rank_quantile(s.errors, 0.50);
        s.q90 = nearest_rank_quantile(s.errors, 0.90);
        s.q95 = nearest_rank_quantile(s.errors, 0.95);
        s.q99 = nearest_rank_quantile(s.errors, 0.99);
        // Summation over the sorted errors keeps the mean independent of scheduling.
        s.mean = std::accumulate(s.errors.begin(), s.errors.end(), 0.0) / static_cast<double>(s.errors.size());
        s.max = s.errors.back();
        s.exceed_bound = static_cast<std::size_t>(
            std::count_if(s.errors.begin(), s.errors.end(), [&](double x) { return x > cr.theoretical_bound; }));
      }
      cr.estimators.push_back(std::move(s));
    }
    if (cfg.record_timing) {
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        cell_time += durations[cell.index * cfg.trials + t];
      }
      cr.wall_seconds = cell_time;
    }
    report.cells.push_back(std::move(cr));
  }
  if (cfg.record_timing) {
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

LogLogFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw DomainError("fit_loglog_slope: xs and ys differ in length");
  }
  if (xs.size() < 3) {
    throw DomainError("fit_loglog_slope needs at least 3 points");
  }
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw DomainError("fit_loglog_slope needs finite positive values");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw DomainError("fit_loglog_slope needs at least two distinct x values");
  }
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace robust_mean
