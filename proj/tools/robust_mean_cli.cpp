// robust-mean: command-line front end for the robust_mean library.
//
// Exit codes: 0 success, 2 malformed input, 3 precondition violated, 4 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "robust_mean/baselines.hpp"
#include "robust_mean/contamination.hpp"
#include "robust_mean/errors.hpp"
#include "robust_mean/filter.hpp"
#include "robust_mean/harness.hpp"
#include "robust_mean/json_io.hpp"
#include "robust_mean/mom.hpp"
#include "robust_mean/points_io.hpp"
#include "robust_mean/stability.hpp"

namespace rm = robust_mean;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitInternal = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "1.5" or "1,2,3"; a single value is broadcast to d coordinates.
rm::Vector parse_vector(const std::string& text, std::size_t d, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (values.size() == 1) {
    return rm::Vector::Constant(static_cast<Eigen::Index>(d), values[0]);
  }
  if (values.size() != d) {
    throw UsageError(std::string(flag) + ": expected 1 or " + std::to_string(d) + " values");
  }
  return Eigen::Map<rm::Vector>(values.data(), static_cast<Eigen::Index>(d));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << text;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct EstimateArgs {
  std::string input;
  std::string method;
  std::optional<double> eps;
  std::optional<double> tau;
  std::uint64_t seed = 0;
  std::string trace;
  bool prune = false;
  double c_prune = 10.0;
};

int run_estimate(const EstimateArgs& a) {
  const bool robust = a.method == "filter" || a.method == "mom-filter";
  if (robust && !a.eps) {
    throw UsageError("--method " + a.method + " needs --eps");
  }
  if (a.method == "mom-filter" && !a.tau) {
    throw UsageError("--method mom-filter needs --tau");
  }
  if (a.prune && !a.eps) {
    throw UsageError("--prune needs --eps");
  }
  rm::PointSet points = rm::read_points_csv_file(a.input);
  const std::size_t n_input = points.n();

  json diagnostics = json::object();
  if (a.prune) {
    rm::PruneResult pruned = rm::prune(points, *a.eps, a.c_prune);
    diagnostics["pruned"] = pruned.removed.size();
    points = std::move(pruned.kept);
  }

  std::optional<rm::FilterTrace> trace;
  rm::Vector estimate;
  if (a.method == "mean") {
    estimate = rm::empirical_mean(points);
  } else if (a.method == "median") {
    estimate = rm::coord_median(points);
  } else if (a.method == "geo-median") {
    estimate = rm::geometric_median(points);
  } else if (a.method == "filter") {
    rm::FilterConfig cfg;
    cfg.eps = *a.eps;
    rm::FilterResult r = rm::universal_filter(points, cfg);
    estimate = r.estimate;
    diagnostics["iterations"] = r.trace.iterations;
    diagnostics["final_mass"] = r.trace.final_weights.mass();
    diagnostics["exit"] = rm::to_string(r.trace.exit);
    trace = std::move(r.trace);
  } else {
    rm::MomConfig cfg;
    cfg.eps = *a.eps;
    cfg.tau = *a.tau;
    rm::MomResult r = rm::mom_filter_estimate(points, cfg, a.seed);
    estimate = r.estimate;
    const rm::MomDiagnostics& g = r.diagnostics;
    diagnostics["k"] = g.k;
    diagnostics["m"] = g.m;
    diagnostics["dropped"] = g.dropped;
    diagnostics["used_filter"] = g.used_filter;
    diagnostics["filter_iterations"] = g.filter_iterations;
    diagnostics["filter_final_mass"] = g.filter_final_mass;
    diagnostics["filter_exit"] = g.filter_exit ? json(rm::to_string(*g.filter_exit)) : json(nullptr);
    diagnostics["theoretical_error_bound"] = g.theoretical_error_bound;
    trace = std::move(r.trace);
  }

  if (!a.trace.empty()) {
    std::ofstream out(a.trace);
    if (!out) {
      throw std::runtime_error("cannot write '" + a.trace + "'");
    }
    if (trace) {
      rm::write_trace_lines(*trace, out);
    }
  }

  const json out = {{"schema_version", rm::kSchemaVersion},
                    {"estimate", rm::vector_to_json(estimate)},
                    {"method", a.method},
                    {"n", n_input},
                    {"d", points.d()},
                    {"eps", optional_json(a.eps)},
                    {"tau", optional_json(a.tau)},
                    {"seed", a.seed},
                    {"diagnostics", diagnostics}};
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

struct ContaminateArgs {
  std::string input;
  std::string output;
  std::string indices;
  std::string attack;
  double eps = 0.0;
  std::optional<double> magnitude;
  std::string direction = "auto";
  std::uint64_t seed = 0;
};

int run_contaminate(const ContaminateArgs& a) {
  const rm::PointSet clean = rm::read_points_csv_file(a.input);
  rm::AttackSpec spec;
  spec.kind = rm::attack_kind_from_string(a.attack);
  spec.eps = a.eps;
  spec.magnitude = a.magnitude;
  if (a.direction == "e1") {
    spec.direction = rm::Vector::Unit(static_cast<Eigen::Index>(clean.d()), 0);
  } else if (a.direction != "auto") {
    spec.direction = parse_vector(a.direction, clean.d(), "--direction");
  }
  if (spec.kind == rm::AttackKind::huber_additive) {
    throw rm::DomainError("huber_additive draws fresh samples; use simulate instead of contaminate");
  }
  const rm::ContaminatedSample result = rm::attack_strong(clean, spec, a.seed);
  rm::write_points_csv_file(result.points, a.output);

  const json sidecar = {{"schema_version", rm::kSchemaVersion},
                        {"attack", rm::to_string(spec.kind)},
                        {"eps", spec.eps},
                        {"magnitude", spec.kind == rm::AttackKind::none ? json(nullptr)
                                                                        : json(spec.resolved_magnitude())},
                        {"seed", a.seed},
                        {"n", clean.n()},
                        {"corrupted_indices", result.corrupted_indices}};
  write_text(a.indices.empty() ? a.output + ".corrupted.json" : a.indices, sidecar.dump(2) + "\n");
  return kExitOk;
}

struct StabilityArgs {
  std::string input;
  std::string mu = "0";
  double sigma2 = 1.0;
  double eps = 0.1;
  std::optional<double> delta;
  std::optional<double> eps_prime;
  std::uint64_t seed = 0;
  bool exact = false;
  bool sufficient_cov = false;
  bool sufficient_moments = false;
};

int run_check_stability(const StabilityArgs& a) {
  if (static_cast<int>(a.exact) + static_cast<int>(a.sufficient_cov) + static_cast<int>(a.sufficient_moments) > 1) {
    throw UsageError("choose one of --exact, --sufficient-cov, --sufficient-moments");
  }
  const rm::PointSet points = rm::read_points_csv_file(a.input);
  const rm::Vector mu = parse_vector(a.mu, points.d(), "--mu");
  rm::StabilityCertificate cert;
  if (a.sufficient_cov) {
    if (!a.eps_prime) {
      throw UsageError("--sufficient-cov needs --eps-prime");
    }
    cert = rm::sufficient_check_cov(points, mu, a.sigma2, a.eps, *a.eps_prime);
  } else {
    if (!a.delta) {
      throw UsageError("--delta is required");
    }
    if (a.sufficient_moments) {
      cert = rm::sufficient_check_moments(points, mu, a.eps, *a.delta, a.seed);
    } else {
      cert = rm::exact_stability_check(points, {a.eps, *a.delta, mu, a.sigma2});
    }
  }
  std::cout << rm::certificate_to_json(cert).dump(2) << '\n';
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  std::string output;
  std::string csv;
  std::optional<std::size_t> threads;
};

std::size_t threads_from_env() {
  const char* env = std::getenv("ROBUST_MEAN_THREADS");
  if (env == nullptr || *env == '\0') {
    return 0;
  }
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') {
    throw UsageError(std::string("ROBUST_MEAN_THREADS is not a count: '") + env + "'");
  }
  return static_cast<std::size_t>(v);
}

int run_simulate(const SimulateArgs& a) {
  std::ifstream in(a.config);
  if (!in) {
    throw rm::ParseError("cannot open '" + a.config + "'", 0, 0);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw rm::ParseError(std::string("config is not valid JSON: ") + e.what(), 0, 0);
  }
  const rm::ExperimentConfig cfg = rm::config_from_json(j);
  const std::size_t workers = a.threads ? *a.threads : threads_from_env();
  const rm::ExperimentReport report = rm::run_experiment(cfg, workers);

  const std::string text = rm::report_to_json(report).dump(2) + "\n";
  if (a.output.empty() || a.output == "-") {
    std::cout << text;
  } else {
    write_text(a.output, text);
  }
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) {
      throw std::runtime_error("cannot write '" + a.csv + "'");
    }
    rm::write_report_csv(report, out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outlier-robust mean estimation"};
  app.set_version_flag("--version", rm::kVersion);
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the mean of a CSV point file");
  estimate->add_option("--input", est.input, "CSV file, one point per row")->required();
  estimate->add_option("--method", est.method)
      ->required()
      ->check(CLI::IsMember({"mean", "median", "geo-median", "filter", "mom-filter"}));
  estimate->add_option("--eps", est.eps, "Contamination fraction");
  estimate->add_option("--tau", est.tau, "Failure probability (mom-filter)");
  estimate->add_option("--seed", est.seed, "Bucketing seed (mom-filter)");
  estimate->add_option("--trace", est.trace, "Write the filter trace as JSON lines");
  estimate->add_flag("--prune", est.prune, "Drop far points before estimating");
  estimate->add_option("--c-prune", est.c_prune, "Prune radius multiplier");

  ContaminateArgs con;
  auto* contaminate = app.add_subcommand("contaminate", "Apply a strong-contamination attack to a CSV point file");
  contaminate->add_option("--input", con.input)->required();
  contaminate->add_option("--output", con.output)->required();
  contaminate->add_option("--indices", con.indices, "Sidecar JSON path (default OUTPUT.corrupted.json)");
  contaminate->add_option("--attack", con.attack)
      ->required()
      ->check(CLI::IsMember({"none", "shift_cluster", "far_cluster", "deletion_tail", "huber_additive"}));
  contaminate->add_option("--eps", con.eps)->required();
  contaminate->add_option("--magnitude", con.magnitude, "Default 1/sqrt(eps)");
  contaminate->add_option("--direction", con.direction, "auto, e1, or comma-separated vector");
  contaminate->add_option("--seed", con.seed);

  StabilityArgs stab;
  auto* check = app.add_subcommand("check-stability", "Certify or refute (eps, delta)-stability");
  check->add_option("--input", stab.input)->required();
  check->add_option("--mu", stab.mu, "Reference mean, scalar or comma-separated (default 0)");
  check->add_option("--sigma2", stab.sigma2);
  check->add_option("--eps", stab.eps)->required();
  check->add_option("--delta", stab.delta);
  check->add_option("--eps-prime", stab.eps_prime);
  check->add_option("--seed", stab.seed, "Probe seed (sufficient-moments)");
  check->add_flag("--exact", stab.exact, "Exhaustive check, n <= 25 (default)");
  check->add_flag("--sufficient-cov", stab.sufficient_cov);
  check->add_flag("--sufficient-moments", stab.sufficient_moments);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
  simulate->add_option("--config", sim.config)->required();
  simulate->add_option("--output", sim.output, "Report JSON (default stdout)");
  simulate->add_option("--csv", sim.csv, "Flat CSV of quantiles");
  simulate->add_option("--threads", sim.threads, "Worker threads, 0 = auto (overrides ROBUST_MEAN_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }

  try {
    if (*estimate) {
      return run_estimate(est);
    }
    if (*contaminate) {
      return run_contaminate(con);
    }
    if (*check) {
      return run_check_stability(stab);
    }
    return run_simulate(sim);
  } catch (const rm::ParseError& e) {
    std::cerr << "error: " << e.what();
    if (e.row() != 0) {
      std::cerr << " (row " << e.row();
      if (e.column() != 0) {
        std::cerr << ", column " << e.column();
      }
      std::cerr << ')';
    }
    std::cerr << '\n';
    return kExitInput;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const rm::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const rm::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
