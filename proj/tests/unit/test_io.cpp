#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "robust_mean/distributions.hpp"
#include "robust_mean/errors.hpp"
#include "robust_mean/json_io.hpp"
#include "robust_mean/points_io.hpp"

using namespace robust_mean;

namespace {

PointSet parse(const std::string& text) {
  std::istringstream in(text);
  return read_points_csv(in);
}

void check_parse_error(const std::string& text, std::size_t row, std::size_t column) {
  try {
    parse(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == row);
    CHECK(e.column() == column);
  }
}

}  // namespace

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-1.5e-300) == "-1.5e-300");
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("points CSV round trip is bit exact") {
  const auto pts = sample(DistributionSpec::standard(Family::radial_pareto, 4, 3.0, 2.5), 500, 3);
  std::stringstream buf;
  write_points_csv(pts, buf);
  CHECK(buf.str().rfind("x1,x2,x3,x4\n", 0) == 0);
  const auto back = read_points_csv(buf);
  CHECK(back.data() == pts.data());

  const auto path = (std::filesystem::temp_directory_path() / "robust_mean_io_test.csv").string();
  write_points_csv_file(pts, path);
  CHECK(read_points_csv_file(path).data() == pts.data());
  std::filesystem::remove(path);
}

TEST_CASE("header detection") {
  CHECK(parse("a,b\n1,2\n3,4\n").n() == 2);
  CHECK(parse("1,2\n3,4\n").n() == 2);
  CHECK(parse("x\n1\n").n() == 1);
  // numeric-looking first row is data, including a leading plus sign
  CHECK(parse("+1,2e3\n3,4\n").data()(0, 1) == 2000.0);
  // blank lines, CRLF and padding are tolerated
  const auto p = parse("a, b\r\n\r\n 1 ,\t2\r\n\n3,4\n");
  CHECK(p.n() == 2);
  CHECK(p.data()(0, 0) == 1.0);
  CHECK(p.data()(1, 1) == 4.0);
}

TEST_CASE("parse errors name the row and column") {
  check_parse_error("1,2\n3,x\n", 2, 2);
  check_parse_error("h1,h2\n1,2\n3\n", 3, 0);
  check_parse_error("1,2\n3,4,5\n", 2, 0);
  check_parse_error("1\nnan\n", 2, 1);
  check_parse_error("1\ninf\n", 2, 1);
  check_parse_error("1\n1e999\n", 2, 1);
  check_parse_error("1,2,3\n1,,2\n", 2, 2);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("a,b\n"), ParseError);
  CHECK_THROWS_AS(read_points_csv_file("/nonexistent/points.csv"), ParseError);
}

TEST_CASE("report CSV has one row per cell, estimator and quantile") {
  ExperimentConfig cfg;
  cfg.estimators = {EstimatorKind::empirical_mean, EstimatorKind::filter};
  cfg.grid = {{50}, {2}, {0.0, 0.1}, {0.1}};
  cfg.trials = 2;
  const auto report = run_experiment(cfg);
  std::ostringstream out;
  write_report_csv(report, out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "cell,n,d,eps,tau,estimator,quantile,value");
  int rows = 0;
  int nan_rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    nan_rows += line.ends_with(",nan");
  }
  CHECK(rows == 2 * 2 * 4);
  // the filter rejects eps = 0, so its first cell has no errors
  CHECK(nan_rows == 4);
}

TEST_CASE("report JSON layout") {
  ExperimentConfig cfg;
  cfg.estimators = {EstimatorKind::coord_median};
  cfg.grid = {{30}, {2}, {0.1}, {0.1}};
  cfg.trials = 3;
  auto j = report_to_json(run_experiment(cfg));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["provenance"]["config_hash"] == config_hash(cfg));
  CHECK(j["provenance"]["version"] == kVersion);
  CHECK(j["cells"].size() == 1);
  CHECK_FALSE(j["cells"][0]["estimators"][0].contains("errors"));
  CHECK_FALSE(j.contains("wall_seconds"));
  cfg.record_timing = true;
  cfg.keep_errors = true;
  j = report_to_json(run_experiment(cfg));
  CHECK(j.contains("wall_seconds"));
  CHECK(j["cells"][0]["estimators"][0]["errors"].size() == 3);
}

TEST_CASE("config JSON accepts scalar grid axes and direction forms") {
  const auto j = nlohmann::json::parse(R"({
    "schema_version": 1,
    "distribution": {"family": "multivariate_t", "nu": 4, "mu": 1.5},
    "attack": {"kind": "far_cluster", "magnitude": 20, "direction": [0, 1, 0]},
    "estimators": ["filter"],
    "grid": {"n": 100, "d": 3, "eps": [0.05, 0.1]}
  })");
  const auto cfg = config_from_json(j);
  CHECK(cfg.grid.n == std::vector<std::size_t>{100});
  CHECK(cfg.grid.eps.size() == 2);
  CHECK(cfg.distribution.instantiate(3).mu == Vector::Constant(3, 1.5));
  CHECK(cfg.attack.direction_mode == DirectionMode::explicit_vector);
  CHECK(cfg.trials == 1);

  auto e1 = j;
  e1["attack"]["direction"] = "e1";
  CHECK(config_from_json(e1).attack.direction_mode == DirectionMode::first_axis);
  auto bad = j;
  bad["attack"]["direction"] = "sideways";
  CHECK_THROWS_AS(config_from_json(bad), DomainError);
  auto no_dist = j;
  no_dist.erase("distribution");
  CHECK_THROWS_AS(config_from_json(no_dist), DomainError);
}
