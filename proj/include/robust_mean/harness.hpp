#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robust_mean/contamination.hpp"
#include "robust_mean/distributions.hpp"
#include "robust_mean/stability.hpp"

namespace robust_mean {

inline constexpr const char* kVersion = "0.1.0";

enum class EstimatorKind { empirical_mean, coord_median, geometric_median, filter, mom_filter };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(const std::string& name);

// Distribution without a dimension; the grid supplies d.
struct DistributionTemplate {
  Family family = Family::gaussian;
  double cov_scale = 1.0;
  double nu = 0.0;
  double alpha = 0.0;
  double mu_fill = 0.0;           // every coordinate of the mean, unless mu is given
  std::optional<std::vector<double>> mu;

  DistributionSpec instantiate(std::size_t d) const;
};

enum class DirectionMode { auto_top, first_axis, explicit_vector };

// Attack without eps; the grid supplies eps.
struct AttackTemplate {
  AttackKind kind = AttackKind::none;
  std::optional<double> magnitude;
  DirectionMode direction_mode = DirectionMode::auto_top;
  std::vector<double> direction;  // explicit_vector only

  AttackSpec instantiate(std::size_t d, double eps) const;
};

struct GridSpec {
  std::vector<std::size_t> n;
  std::vector<std::size_t> d;
  std::vector<double> eps;
  std::vector<double> tau{0.01};
};

struct FilterSettings {
  double eig_tol = 1e-8;
  bool prune = false;
  double c_prune = 10.0;
};

struct MomSettings {
  double c0 = 5.0;
  double eps_filter = 0.02;
};

struct ExperimentConfig {
  DistributionTemplate distribution;
  AttackTemplate attack;
  std::vector<EstimatorKind> estimators;
  GridSpec grid;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  FilterSettings filter;
  MomSettings mom;
  RateConstants bound_constants;
  bool record_timing = false;  // wall times make reports non-reproducible
  bool keep_errors = false;    // serialize the sorted per-trial errors

  void validate() const;
};

struct Cell {
  std::size_t index = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  double eps = 0.0;
  double tau = 0.01;
};

// Cartesian product of the grid, n outermost, then d, eps, tau.
std::vector<Cell> enumerate_cells(const GridSpec& grid);

struct TrialOutcome {
  EstimatorKind estimator = EstimatorKind::empirical_mean;
  std::optional<double> error;  // ||mu_hat - mu||; absent when the estimator failed
  std::string failure;
};

// Seed of one trial; a pure function of its position, so extending `trials`
// leaves earlier trials unchanged.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t cell_index, std::size_t trial_index);

std::vector<TrialOutcome> run_trial(const ExperimentConfig& cfg, const Cell& cell, std::size_t trial_index);

struct EstimatorSummary {
  EstimatorKind estimator = EstimatorKind::empirical_mean;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::optional<double> q50, q90, q95, q99, mean, max;
  std::size_t exceed_bound = 0;
  std::vector<double> errors;  // sorted ascending
};

struct CellReport {
  Cell cell;
  double theoretical_bound = 0.0;
  std::vector<EstimatorSummary> estimators;
  std::optional<double> wall_seconds;

  const EstimatorSummary& summary(EstimatorKind kind) const;
};

struct ExperimentReport {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string version = kVersion;
  bool keep_errors = false;
  std::vector<CellReport> cells;
  std::optional<double> wall_seconds;
};

// Runs every cell x trial on `workers` threads (0 = hardware concurrency). The
// report does not depend on the worker count or scheduling.
ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t workers = 1);

// Nearest-rank quantile of sorted data: element ceil(q N) - 1.
double nearest_rank_quantile(std::span<const double> sorted, double q);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares of ln y on ln x. Needs >= 3 points, all positive.
LogLogFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace robust_mean
