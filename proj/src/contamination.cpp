#include "robust_mean/contamination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robust_mean/errors.hpp"
#include "robust_mean/linalg.hpp"

namespace robust_mean {
namespace {

Vector column_mean(const PointSet& points) {
  return points.data().colwise().mean().transpose();
}

// Indices ordered by projection ascending (descending if `largest_first`), ties by index.
IndexList order_by_projection(const PointSet& points, const Vector& u, bool largest_first) {
  const Vector proj = points.data() * u;
  IndexList order(points.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double pa = proj[static_cast<Eigen::Index>(a)];
    const double pb = proj[static_cast<Eigen::Index>(b)];
    return largest_first ? pa > pb : pa < pb;
  });
  return order;
}

}  // namespace

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none:
      return "none";
    case AttackKind::shift_cluster:
      return "shift_cluster";
    case AttackKind::far_cluster:
      return "far_cluster";
    case AttackKind::deletion_tail:
      return "deletion_tail";
    case AttackKind::huber_additive:
      return "huber_additive";
  }
  return "unknown";
}

AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "none") return AttackKind::none;
  if (name == "shift_cluster") return AttackKind::shift_cluster;
  if (name == "far_cluster") return AttackKind::far_cluster;
  if (name == "deletion_tail") return AttackKind::deletion_tail;
  if (name == "huber_additive") return AttackKind::huber_additive;
  throw DomainError("unknown attack kind '" + name + "'");
}

void AttackSpec::validate() const {
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw DomainError("attack eps must lie in [0, 1/2)");
  }
  if (magnitude && !(*magnitude >= 0.0 && std::isfinite(*magnitude))) {
    throw DomainError("attack magnitude must be finite and >= 0");
  }
  if (direction && (!direction->allFinite() || !(direction->norm() > 0.0))) {
    throw DomainError("attack direction must be a finite nonzero vector");
  }
}

double AttackSpec::resolved_magnitude() const {
  if (magnitude) {
    return *magnitude;
  }
  return eps > 0.0 ? 1.0 / std::sqrt(eps) : 0.0;
}

Vector resolve_direction(const PointSet& clean, const AttackSpec& spec) {
  if (spec.direction) {
    if (static_cast<std::size_t>(spec.direction->size()) != clean.d()) {
      throw DomainError("attack direction dimension mismatch");
    }
    return spec.direction->normalized();
  }
  const WeightVector w = WeightVector::uniform(clean.n());
  const Matrix cov = weighted_covariance(clean, w, weighted_mean(clean, w));
  return top_eigenpair(cov).vector;
}

ContaminatedSample attack_strong(const PointSet& clean, const AttackSpec& spec, std::uint64_t seed,
                                 const std::optional<Vector>& population_mean) {
  spec.validate();
  Vector truth = population_mean ? *population_mean : column_mean(clean);
  if (static_cast<std::size_t>(truth.size()) != clean.d()) {
    throw DomainError("population mean dimension mismatch");
  }
  const std::size_t n = clean.n();
  const std::size_t budget = floor_count(spec.eps, n);

  if (spec.kind == AttackKind::huber_additive) {
    throw DomainError("huber_additive is not an inspect-then-replace attack; use attack_huber");
  }
  if (spec.kind == AttackKind::none || budget == 0) {
    return {clean, {}, std::move(truth)};
  }

  const Vector u = resolve_direction(clean, spec);
  const Vector target = column_mean(clean) + spec.resolved_magnitude() * u;
  RowMatrix data = clean.data();
  IndexList corrupted;
  Rng rng(seed);

  switch (spec.kind) {
    case AttackKind::shift_cluster: {
      const IndexList order = order_by_projection(clean, u, /*largest_first=*/false);
      corrupted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget));
      for (std::size_t i : corrupted) {
        data.row(static_cast<Eigen::Index>(i)) = target.transpose();
      }
      break;
    }
    case AttackKind::far_cluster: {
      corrupted = random_subset(n, budget, rng);
      for (std::size_t i : corrupted) {
        data.row(static_cast<Eigen::Index>(i)) = target.transpose();
      }
      break;
    }
    case AttackKind::deletion_tail: {
      const IndexList order = order_by_projection(clean, u, /*largest_first=*/true);
      corrupted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget));
      std::sort(corrupted.begin(), corrupted.end());
      IndexList survivors(order.begin() + static_cast<std::ptrdiff_t>(budget), order.end());
      std::sort(survivors.begin(), survivors.end());
      const IndexList picks = random_subset(survivors.size(), budget, rng);
      for (std::size_t j = 0; j < budget; ++j) {
        data.row(static_cast<Eigen::Index>(corrupted[j])) =
            clean.row(survivors[picks[j]]);
      }
      break;
    }
    default:
      throw DomainError("unsupported strong attack kind '" + to_string(spec.kind) + "'");
  }
  std::sort(corrupted.begin(), corrupted.end());
  return {PointSet(std::move(data)), std::move(corrupted), std::move(truth)};
}

ContaminatedSample attack_huber(const DistributionSpec& generator, const NoiseSpec& noise,
                                double eps, std::size_t n, std::uint64_t seed) {
  generator.validate();
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw DomainError("huber eps must lie in [0, 1/2)");
  }
  if (n < 1) {
    throw DomainError("sample size must be >= 1");
  }
  const std::size_t d = generator.d();
  if (const auto* spec = std::get_if<DistributionSpec>(&noise)) {
    spec->validate();
    if (spec->d() != d) {
      throw DomainError("noise distribution dimension mismatch");
    }
  } else {
    const auto& mass = std::get<PointMass>(noise);
    if (static_cast<std::size_t>(mass.location.size()) != d || !mass.location.allFinite()) {
      throw DomainError("point-mass noise must be a finite vector of dimension d");
    }
  }

  RowMatrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  IndexList corrupted;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> row(data.row(static_cast<Eigen::Index>(i)).data(), d);
    if (rng.coin(eps)) {
      corrupted.push_back(i);
      if (const auto* spec = std::get_if<DistributionSpec>(&noise)) {
        draw_point(*spec, rng, row);
      } else {
        const auto& loc = std::get<PointMass>(noise).location;
        std::copy(loc.data(), loc.data() + d, row.begin());
      }
    } else {
      draw_point(generator, rng, row);
    }
  }
  return {PointSet(std::move(data)), std::move(corrupted), generator.mu};
}

}  // namespace robust_mean
