#include "robust_mean/json_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>

#include "robust_mean/errors.hpp"
#include "robust_mean/points_io.hpp"

namespace robust_mean {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("config field '") + key + "': " + e.what());
  }
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw DomainError(std::string("config is missing field '") + key + "'");
  }
  return j.at(key);
}

template <typename T>
std::vector<T> number_list(const json& j, const char* key) {
  const json& node = require(j, key);
  try {
    if (node.is_array()) {
      return node.get<std::vector<T>>();
    }
    return {node.get<T>()};
  } catch (const json::exception& e) {
    throw DomainError(std::string("config field '") + key + "': " + e.what());
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
  }
  return out;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    throw DomainError("experiment config must be a JSON object");
  }
  const int version = get_or<int>(j, "schema_version", kSchemaVersion);
  if (version != kSchemaVersion) {
    throw DomainError("unsupported schema_version " + std::to_string(version));
  }
  ExperimentConfig cfg;

  const json& dist = require(j, "distribution");
  cfg.distribution.family = family_from_string(get_or<std::string>(dist, "family", "gaussian"));
  cfg.distribution.cov_scale = get_or<double>(dist, "cov_scale", 1.0);
  cfg.distribution.nu = get_or<double>(dist, "nu", 0.0);
  cfg.distribution.alpha = get_or<double>(dist, "alpha", 0.0);
  if (dist.contains("mu") && dist.at("mu").is_array()) {
    cfg.distribution.mu = dist.at("mu").get<std::vector<double>>();
  } else {
    cfg.distribution.mu_fill = get_or<double>(dist, "mu", 0.0);
  }

  if (j.contains("attack")) {
    const json& attack = j.at("attack");
    cfg.attack.kind = attack_kind_from_string(get_or<std::string>(attack, "kind", "none"));
    if (attack.contains("magnitude") && !attack.at("magnitude").is_null()) {
      cfg.attack.magnitude = get_or<double>(attack, "magnitude", 0.0);
    }
    if (attack.contains("direction") && attack.at("direction").is_array()) {
      cfg.attack.direction_mode = DirectionMode::explicit_vector;
      cfg.attack.direction = attack.at("direction").get<std::vector<double>>();
    } else {
      const auto mode = get_or<std::string>(attack, "direction", "auto");
      if (mode == "auto") {
        cfg.attack.direction_mode = DirectionMode::auto_top;
      } else if (mode == "e1") {
        cfg.attack.direction_mode = DirectionMode::first_axis;
      } else {
        throw DomainError("attack direction must be \"auto\", \"e1\" or a list of numbers");
      }
    }
  }

  for (const auto& name : get_or<std::vector<std::string>>(j, "estimators", {})) {
    cfg.estimators.push_back(estimator_from_string(name));
  }

  const json& grid = require(j, "grid");
  cfg.grid.n = number_list<std::size_t>(grid, "n");
  cfg.grid.d = number_list<std::size_t>(grid, "d");
  cfg.grid.eps = number_list<double>(grid, "eps");
  if (grid.contains("tau")) {
    cfg.grid.tau = number_list<double>(grid, "tau");
  }

  cfg.trials = get_or<std::size_t>(j, "trials", 1);
  cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    cfg.filter.eig_tol = get_or<double>(f, "eig_tol", cfg.filter.eig_tol);
    cfg.filter.prune = get_or<bool>(f, "prune", cfg.filter.prune);
    cfg.filter.c_prune = get_or<double>(f, "c_prune", cfg.filter.c_prune);
  }
  if (j.contains("mom")) {
    const json& m = j.at("mom");
    cfg.mom.c0 = get_or<double>(m, "c0", cfg.mom.c0);
    cfg.mom.eps_filter = get_or<double>(m, "eps_filter", cfg.mom.eps_filter);
  }
  if (j.contains("bound_constants")) {
    const auto c = j.at("bound_constants").get<std::vector<double>>();
    if (c.size() != 3) {
      throw DomainError("bound_constants must hold three numbers");
    }
    cfg.bound_constants = {c[0], c[1], c[2]};
  }
  cfg.record_timing = get_or<bool>(j, "record_timing", false);
  cfg.keep_errors = get_or<bool>(j, "keep_errors", false);
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json dist = {{"family", to_string(cfg.distribution.family)},
               {"cov_scale", cfg.distribution.cov_scale},
               {"nu", cfg.distribution.nu},
               {"alpha", cfg.distribution.alpha}};
  dist["mu"] = cfg.distribution.mu ? json(*cfg.distribution.mu) : json(cfg.distribution.mu_fill);

  json attack = {{"kind", to_string(cfg.attack.kind)},
                 {"magnitude", optional_number(cfg.attack.magnitude)}};
  switch (cfg.attack.direction_mode) {
    case DirectionMode::auto_top:
      attack["direction"] = "auto";
      break;
    case DirectionMode::first_axis:
      attack["direction"] = "e1";
      break;
    case DirectionMode::explicit_vector:
      attack["direction"] = cfg.attack.direction;
      break;
  }

  json estimators = json::array();
  for (EstimatorKind e : cfg.estimators) {
    estimators.push_back(to_string(e));
  }
  return {{"schema_version", kSchemaVersion},
          {"distribution", dist},
          {"attack", attack},
          {"estimators", estimators},
          {"grid", {{"n", cfg.grid.n}, {"d", cfg.grid.d}, {"eps", cfg.grid.eps}, {"tau", cfg.grid.tau}}},
          {"trials", cfg.trials},
          {"master_seed", cfg.master_seed},
          {"filter",
           {{"eig_tol", cfg.filter.eig_tol}, {"prune", cfg.filter.prune}, {"c_prune", cfg.filter.c_prune}}},
          {"mom", {{"c0", cfg.mom.c0}, {"eps_filter", cfg.mom.eps_filter}}},
          {"bound_constants", {cfg.bound_constants.c1, cfg.bound_constants.c2, cfg.bound_constants.c3}},
          {"record_timing", cfg.record_timing},
          {"keep_errors", cfg.keep_errors}};
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json report_to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const CellReport& cr : report.cells) {
    json estimators = json::array();
    for (const EstimatorSummary& s : cr.estimators) {
      json e = {{"estimator", to_string(s.estimator)},
                {"trials", s.trials},
                {"failures", s.failures},
                {"q50", optional_number(s.q50)},
                {"q90", optional_number(s.q90)},
                {"q95", optional_number(s.q95)},
                {"q99", optional_number(s.q99)},
                {"mean", optional_number(s.mean)},
                {"max", optional_number(s.max)},
                {"exceed_bound", s.exceed_bound}};
      if (report.keep_errors) {
        e["errors"] = s.errors;
      }
      estimators.push_back(std::move(e));
    }
    json c = {{"index", cr.cell.index},
              {"n", cr.cell.n},
              {"d", cr.cell.d},
              {"eps", cr.cell.eps},
              {"tau", cr.cell.tau},
              {"theoretical_bound", cr.theoretical_bound},
              {"estimators", std::move(estimators)}};
    if (cr.wall_seconds) {
      c["wall_seconds"] = *cr.wall_seconds;
    }
    cells.push_back(std::move(c));
  }
  json out = {{"schema_version", kSchemaVersion},
              {"provenance",
               {{"config_hash", report.config_hash},
                {"master_seed", report.master_seed},
                {"version", report.version}}},
              {"cells", std::move(cells)}};
  if (report.wall_seconds) {
    out["wall_seconds"] = *report.wall_seconds;
  }
  return out;
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "cell,n,d,eps,tau,estimator,quantile,value\n";
  for (const CellReport& cr : report.cells) {
    for (const EstimatorSummary& s : cr.estimators) {
      const std::pair<const char*, const std::optional<double>*> rows[] = {
          {"q50", &s.q50}, {"q90", &s.q90}, {"q95", &s.q95}, {"q99", &s.q99}};
      for (const auto& [name, value] : rows) {
        out << cr.cell.index << ',' << cr.cell.n << ',' << cr.cell.d << ',' << format_double(cr.cell.eps) << ','
            << format_double(cr.cell.tau) << ',' << to_string(s.estimator) << ',' << name << ','
            << (*value ? format_double(**value) : std::string("nan")) << '\n';
      }
    }
  }
}

json certificate_to_json(const StabilityCertificate& cert) {
  json out = {{"schema_version", kSchemaVersion},
              {"verdict", to_string(cert.verdict)},
              {"eps", cert.eps},
              {"delta", optional_number(cert.certified_delta)},
              {"checker", to_string(cert.checker)}};
  out["witness"] = cert.witness ? json(*cert.witness) : json(nullptr);
  return out;
}

json filter_step_to_json(std::size_t iteration, const FilterStep& step) {
  return {{"iteration", iteration},
          {"lambda", step.lambda},
          {"threshold", step.threshold},
          {"mass_removed", step.mass_removed},
          {"support_size", step.support_size}};
}

void write_trace_lines(const FilterTrace& trace, std::ostream& out) {
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    out << filter_step_to_json(i + 1, trace.steps[i]).dump() << '\n';
  }
}

}  // namespace robust_mean
