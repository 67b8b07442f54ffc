#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "robust_mean/types.hpp"

namespace robust_mean {

// (eps, delta)-stability of a finite set S with respect to mean mu and scale sigma2:
// every S' of S with |S'| >= (1 - eps)|S| has
//   ||mu_S' - mu|| <= sigma delta   and   ||Sigma_S' - sigma2 I|| <= sigma2 delta^2 / eps,
// where Sigma_S' is the second moment of S' centered at the reference mu.
struct StabilityParams {
  double eps = 0.1;
  double delta = 0.1;
  Vector mu;
  double sigma2 = 1.0;

  void validate(std::size_t d) const;
};

enum class Verdict { certified, refuted, inconclusive };
enum class Checker { exact, sufficient_cov, sufficient_moments, probe_lower_bound };

std::string to_string(Verdict verdict);
std::string to_string(Checker checker);

struct StabilityCertificate {
  Verdict verdict = Verdict::inconclusive;
  double eps = 0.0;
  std::optional<double> certified_delta;  // present iff certified
  Checker checker = Checker::exact;
  std::optional<IndexList> witness;  // kept indices of an offending subset; present iff refuted
};

inline constexpr std::size_t kExactStabilityMaxPoints = 25;
inline constexpr int kProbeDirections = 64;

// Exhaustive check over every S' with |S'| >= ceil((1 - eps) n). The witness of a
// refutation is the lexicographically smallest violating index list.
// Throws CapacityError for n > 25.
StabilityCertificate exact_stability_check(const PointSet& points, const StabilityParams& params);

// Certifies (eps', delta') with delta' = 2 sqrt(eps') + 2 delta sqrt(eps'/eps), where
// delta = max(eps, ||mu_S - mu|| / sigma, sqrt(eps ||Sigma_S - sigma2 I|| / sigma2)).
StabilityCertificate sufficient_check_cov(const PointSet& points, const Vector& mu, double sigma2,
                                          double eps, double eps_prime);

/// Moment-based sufficient condition at sigma2 = 1. Certifies (eps, 7 delta) when
///   (1) ||mu_S - mu|| <= delta,
///   (2) lambda_max(Sigma_S) <= 1 + delta^2/eps,
///   (3) min over qualifying S' and unit v of v^T Sigma_S' v >= 1 - delta^2/eps.
/// Condition (3) is exact for n <= 25. Above that it is evaluated on probe directions
/// (eigenvectors of Sigma_S plus 64 seeded random unit vectors); a probe pass only
/// shows the condition is not refuted, so the verdict is inconclusive with
/// checker = probe_lower_bound. A probe failure is a genuine refutation.
StabilityCertificate sufficient_check_moments(const PointSet& points, const Vector& mu, double eps,
                                              double delta, std::uint64_t seed = 0);

struct DirectionalMinimum {
  double value = 0.0;
  IndexList subset;  // kept indices attaining it
};

// min over qualifying S' of lambda_min(Sigma_S'), by enumeration (n <= 25).
DirectionalMinimum min_directional_moment_exact(const PointSet& points, const Vector& mu, double eps);

// Same quantity restricted to probe directions. For a fixed v the minimizing S'
// drops the floor(eps n) largest (v.(x - mu))^2. Never below the exact value.
DirectionalMinimum min_directional_moment_probe(const PointSet& points, const Vector& mu, double eps,
                                                std::uint64_t seed);

// Indices of the n - floor(2 eps n) largest weights (ties: lower index first),
// returned ascending. w must lie in the capped simplex for eps (1e-9 tolerance).
IndexList round_weights_top(const WeightVector& w, double eps);

struct RateConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
};

struct RateInputs {
  double n = 1.0;
  double trace_sigma = 1.0;
  double norm_sigma = 1.0;
  double eps = 0.0;
  double tau = 0.5;
  std::size_t d = 1;  // dimension, used by the bounded-moments rate
  std::optional<int> k;
  std::optional<double> sigma_k;
  std::optional<double> sigma_4;

  void validate() const;
  double stable_rank() const;
};

enum class RateRegime { bounded_cov, bounded_moments };

// bounded_cov:     c1 sqrt(r log(max(r, e)) / n) + c2 sqrt(eps) + c3 sqrt(ln(1/tau) / n)
// bounded_moments: c1 sqrt(d log(max(d, e)) / n) + c2 sigma_k eps^(1 - 1/k)
//                    + c3 sigma_4 sqrt(ln(1/tau) / n)
double theoretical_delta(const RateInputs& inputs, RateRegime regime, RateConstants constants = {});

// c1 sqrt(tr(Sigma)/n) + c2 sqrt(||Sigma|| eps) + c3 sqrt(||Sigma|| ln(1/tau) / n)
double theoretical_error_bound(const RateInputs& inputs, RateConstants constants = {});

}  // namespace robust_mean
