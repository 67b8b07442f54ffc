#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "robust_mean/filter.hpp"
#include "robust_mean/harness.hpp"
#include "robust_mean/stability.hpp"

namespace robust_mean {

inline constexpr int kSchemaVersion = 1;

// Throws DomainError on missing or ill-typed fields.
ExperimentConfig config_from_json(const nlohmann::json& j);
// Normalized form with every default filled in.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
// FNV-1a 64 of the normalized config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const ExperimentReport& report);
// Header: cell,n,d,eps,tau,estimator,quantile,value (one row per cell x estimator x quantile).
void write_report_csv(const ExperimentReport& report, std::ostream& out);

// {schema_version, verdict, eps, delta, checker, witness}
nlohmann::json certificate_to_json(const StabilityCertificate& cert);

nlohmann::json filter_step_to_json(std::size_t iteration, const FilterStep& step);
// One JSON object per line, one line per iteration.
void write_trace_lines(const FilterTrace& trace, std::ostream& out);

nlohmann::json vector_to_json(const Vector& v);

}  // namespace robust_mean
