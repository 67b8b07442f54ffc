#include <doctest.h>

#include <cmath>
#include <fstream>

#include "robust_mean/errors.hpp"
#include "robust_mean/harness.hpp"
#include "robust_mean/json_io.hpp"
#include "robust_mean/rng.hpp"

using namespace robust_mean;

namespace {

nlohmann::json load_json(const std::string& name) {
  std::ifstream in(std::string(ROBUST_MEAN_TEST_DATA) + "/" + name);
  REQUIRE(in);
  return nlohmann::json::parse(in);
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.distribution.family = Family::gaussian;
  cfg.attack.kind = AttackKind::shift_cluster;
  cfg.estimators = {EstimatorKind::empirical_mean, EstimatorKind::coord_median, EstimatorKind::filter,
                    EstimatorKind::mom_filter};
  cfg.grid.n = {120, 250};
  cfg.grid.d = {2, 5};
  cfg.grid.eps = {0.05, 0.1};
  cfg.trials = 7;
  cfg.master_seed = 99;
  cfg.keep_errors = true;
  return cfg;
}

void check_monotone(const ExperimentReport& report) {
  for (const auto& cell : report.cells) {
    for (const auto& s : cell.estimators) {
      REQUIRE(s.q50);
      CHECK(*s.q50 <= *s.q90);
      CHECK(*s.q90 <= *s.q95);
      CHECK(*s.q95 <= *s.q99);
      CHECK(*s.q99 <= *s.max);
      CHECK(s.trials == s.errors.size() + s.failures);
    }
  }
}

}  // namespace

TEST_CASE("trial seeds have the prefix property") {
  auto cfg = small_config();
  const auto cell = enumerate_cells(cfg.grid)[3];
  const auto first = run_trial(cfg, cell, 2);
  cfg.trials = 50;
  const auto again = run_trial(cfg, cell, 2);
  REQUIRE(first.size() == again.size());
  for (std::size_t e = 0; e < first.size(); ++e) {
    CHECK(first[e].error == again[e].error);
  }
  CHECK(trial_seed(1, 2, 3) == mix_seed(1, 2, 3));
  CHECK(trial_seed(1, 2, 3) != trial_seed(1, 3, 2));

  // doubling trials keeps the first half of every cell's error list
  cfg.trials = 4;
  const auto half = run_experiment(cfg);
  cfg.trials = 8;
  const auto full = run_experiment(cfg);
  for (std::size_t c = 0; c < half.cells.size(); ++c) {
    const auto& small_errors = half.cells[c].estimators[0].errors;
    const auto& big_errors = full.cells[c].estimators[0].errors;
    for (double x : small_errors) {
      CHECK(std::find(big_errors.begin(), big_errors.end(), x) != big_errors.end());
    }
  }
}

TEST_CASE("cells enumerate n outermost") {
  GridSpec grid;
  grid.n = {10, 20};
  grid.d = {1, 2};
  grid.eps = {0.1};
  grid.tau = {0.1, 0.2};
  const auto cells = enumerate_cells(grid);
  REQUIRE(cells.size() == 8);
  CHECK(cells[0].n == 10);
  CHECK(cells[1].tau == 0.2);
  CHECK(cells[2].d == 2);
  CHECK(cells[4].n == 20);
  CHECK(cells[7].index == 7);
}

TEST_CASE("report quantiles are monotone and scheduling independent") {
  const auto cfg = small_config();
  const auto one = run_experiment(cfg, 1);
  const auto four = run_experiment(cfg, 4);
  check_monotone(one);
  CHECK(report_to_json(one).dump() == report_to_json(four).dump());
  CHECK(one.cells.size() == 8);
  CHECK(one.config_hash == config_hash(cfg));
  CHECK(one.master_seed == 99);
}

TEST_CASE("a single trial gives equal quantiles") {
  auto cfg = small_config();
  cfg.trials = 1;
  cfg.grid = {{50}, {3}, {0.1}, {0.1}};
  const auto report = run_experiment(cfg);
  for (const auto& s : report.cells[0].estimators) {
    REQUIRE(s.errors.size() == 1);
    CHECK(*s.q50 == s.errors[0]);
    CHECK(*s.q99 == s.errors[0]);
    CHECK(*s.mean == s.errors[0]);
    CHECK(*s.max == s.errors[0]);
  }
}

TEST_CASE("nearest rank quantile") {
  const std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(nearest_rank_quantile(xs, 0.5) == 5);
  CHECK(nearest_rank_quantile(xs, 0.9) == 9);
  CHECK(nearest_rank_quantile(xs, 0.95) == 10);
  CHECK(nearest_rank_quantile(xs, 0.01) == 1);
  CHECK(nearest_rank_quantile(xs, 1.0) == 10);
  CHECK_THROWS_AS(nearest_rank_quantile(std::vector<double>{}, 0.5), DomainError);
  CHECK_THROWS_AS(nearest_rank_quantile(xs, 0.0), DomainError);
}

TEST_CASE("loglog slope on exact power laws") {
  const std::vector<double> xs{0.01, 0.02, 0.05, 0.1, 0.2};
  for (double p : {0.5, 0.75}) {
    std::vector<double> ys;
    for (double x : xs) {
      ys.push_back(3.0 * std::pow(x, p));
    }
    const auto fit = fit_loglog_slope(xs, ys);
    CHECK(fit.slope == doctest::Approx(p).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0));
  }
  const std::vector<double> bad{1.0, 0.0, 2.0};
  CHECK_THROWS_AS(fit_loglog_slope(xs, std::vector<double>{1, 2, 3, 4}), DomainError);
  CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2, 3}, bad), DomainError);
  CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
  CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), DomainError);
}

TEST_CASE("loglog slope under 5% multiplicative noise") {
  // Slope standard error is about 0.05 / sqrt(sum (ln x - mean)^2) ~ 0.02 on this grid.
  const std::vector<double> xs{0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    std::vector<double> ys;
    for (double x : xs) {
      ys.push_back(std::pow(x, 0.5) * (1.0 + 0.05 * (2.0 * rng.uniform() - 1.0)));
    }
    inside += std::abs(fit_loglog_slope(xs, ys).slope - 0.5) <= 0.05;
  }
  CHECK(inside == 100);
}

TEST_CASE("clean Gaussian empirical mean matches the CLT") {
  ExperimentConfig cfg;
  cfg.estimators = {EstimatorKind::empirical_mean};
  cfg.grid = {{1000000}, {1}, {0.0}, {0.01}};
  cfg.trials = 100;
  cfg.master_seed = 4;
  cfg.keep_errors = true;
  const auto report = run_experiment(cfg);
  const auto& errors = report.cells[0].estimators[0].errors;
  const double limit = 5.0 / std::sqrt(1e6);
  CHECK(std::count_if(errors.begin(), errors.end(), [&](double x) { return x <= limit; }) >= 99);
}

TEST_CASE("far cluster bias of the empirical mean") {
  ExperimentConfig cfg;
  cfg.attack.kind = AttackKind::far_cluster;
  cfg.attack.magnitude = 40.0;
  cfg.attack.direction_mode = DirectionMode::first_axis;
  cfg.estimators = {EstimatorKind::empirical_mean};
  cfg.grid = {{2000}, {3}, {0.1}, {0.01}};
  cfg.trials = 20;
  cfg.master_seed = 8;
  const auto report = run_experiment(cfg);
  const double planted = 200.0 / 2000.0 * 40.0;
  // sampling noise of the inliers is about sqrt(d/n) ~ 0.04
  for (double e : report.cells[0].estimators[0].errors) {
    CHECK(std::abs(e - planted) < 0.25);
  }
}

TEST_CASE("degenerate n = 4 never crashes") {
  ExperimentConfig cfg;
  cfg.attack.kind = AttackKind::shift_cluster;
  cfg.estimators = {EstimatorKind::empirical_mean, EstimatorKind::coord_median, EstimatorKind::geometric_median,
                    EstimatorKind::filter, EstimatorKind::mom_filter};
  cfg.grid = {{4}, {2}, {0.0, 0.1, 0.3}, {0.1}};
  cfg.trials = 3;
  const auto report = run_experiment(cfg);
  for (const auto& cell : report.cells) {
    for (const auto& s : cell.estimators) {
      CHECK(s.errors.size() + s.failures == 3);
      for (double e : s.errors) {
        CHECK(std::isfinite(e));
      }
    }
  }
  // eps = 0 makes the filter precondition fail; that is a recorded failure
  CHECK(report.cells[0].summary(EstimatorKind::filter).failures == 3);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.grid.eps = {0.5};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.estimators.clear();
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK_THROWS_AS(estimator_from_string("trimmed_mean"), DomainError);
}

TEST_CASE("config JSON round trip and hash") {
  const auto cfg = small_config();
  const auto j = config_to_json(cfg);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);

  auto other = cfg;
  other.master_seed = 100;
  CHECK(config_hash(other) != config_hash(cfg));

  auto wrong = j;
  wrong["schema_version"] = 2;
  CHECK_THROWS_AS(config_from_json(wrong), DomainError);
  auto missing = j;
  missing.erase("grid");
  CHECK_THROWS_AS(config_from_json(missing), DomainError);
  auto bad_type = j;
  bad_type["trials"] = "many";
  CHECK_THROWS_AS(config_from_json(bad_type), DomainError);
}

TEST_CASE("canned 2-cell config reproduces the golden report") {
  const auto cfg = config_from_json(load_json("simulate_2cell.json"));
  const auto golden = load_json("simulate_2cell.report.json");
  CHECK(report_to_json(run_experiment(cfg, 1)) == golden);
  CHECK(report_to_json(run_experiment(cfg, 3)) == golden);
  CHECK(golden["provenance"]["config_hash"] == config_hash(cfg));
}
