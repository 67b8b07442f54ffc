#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "robust_mean/distributions.hpp"
#include "robust_mean/types.hpp"

namespace robust_mean {

enum class AttackKind { none, shift_cluster, far_cluster, deletion_tail, huber_additive };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& name);

struct AttackSpec {
  AttackKind kind = AttackKind::none;
  double eps = 0.0;
  // Absent means 1/sqrt(eps), the bias-maximizing scale for unit covariance.
  std::optional<double> magnitude;
  // Absent means "auto": top eigenvector of the clean sample covariance.
  std::optional<Vector> direction;

  void validate() const;
  double resolved_magnitude() const;
};

// clean_mean is ground truth for scoring only; estimators never see it.
struct ContaminatedSample {
  PointSet points;
  IndexList corrupted_indices;  // sorted ascending
  Vector clean_mean;
};

// Inspect-then-replace adversary (shift_cluster, far_cluster, deletion_tail; none
// passes the sample through). Modifies at most floor(eps n) rows.
// clean_mean defaults to the empirical mean of `clean`.
ContaminatedSample attack_strong(const PointSet& clean, const AttackSpec& spec, std::uint64_t seed,
                                 const std::optional<Vector>& population_mean = std::nullopt);

struct PointMass {
  Vector location;
};

using NoiseSpec = std::variant<DistributionSpec, PointMass>;

// Each of the n points comes from `noise` with probability eps, else from `generator`.
ContaminatedSample attack_huber(const DistributionSpec& generator, const NoiseSpec& noise,
                                double eps, std::size_t n, std::uint64_t seed);

// Direction the adversary uses for the given clean sample.
Vector resolve_direction(const PointSet& clean, const AttackSpec& spec);

}  // namespace robust_mean
