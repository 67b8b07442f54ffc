#include "robust_mean/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "robust_mean/errors.hpp"

namespace robust_mean {
namespace {

Eigen::Map<const Eigen::VectorXd> as_eigen(const WeightVector& w) {
  return {w.values().data(), static_cast<Eigen::Index>(w.size())};
}

void check_weights(const PointSet& points, const WeightVector& w) {
  if (w.size() != points.n()) {
    throw DomainError("weight vector length does not match number of points");
  }
  if (!(w.mass() > 0.0)) {
    throw DomainError("weights have zero mass");
  }
}

void fix_sign(Vector& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= peak * (1.0 - 1e-12)) {
      if (v[i] < 0.0) {
        v = -v;
      }
      return;
    }
  }
}

// True when lambda is (up to slack) the largest eigenvalue: (lambda + slack) I - M is PD.
bool dominates_spectrum(const Matrix& m, double lambda, double slack) {
  Matrix shifted = -m;
  shifted.diagonal().array() += lambda + slack;
  Eigen::LLT<Matrix> llt(shifted);
  return llt.info() == Eigen::Success;
}

struct PowerRun {
  EigenPair pair;
  bool converged = false;
};

// Plain steps before the iteration matrix starts being squared.
constexpr int kPlainSteps = 16;

// Power iteration. After kPlainSteps the iterate is multiplied by M^(2^j) instead
// of M, so a top gap lambda_2 / lambda_1 = 1 - g costs O(log(1/g)) steps rather
// than O(1/g). The residual is always measured against M itself.
PowerRun power_iterate(const Matrix& m, Vector v, double tol, int max_iter, double trace_scale) {
  PowerRun run;
  double lambda = 0.0;
  Matrix p = m;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector y = m * v;
    lambda = v.dot(y);
    const double residual = (y - lambda * v).norm();
    if (residual <= tol * std::max(lambda, trace_scale)) {
      run.pair = {lambda, std::move(v), it};
      run.converged = true;
      return run;
    }
    if (it > kPlainSteps) {
      p = (p * p).eval();
      p = 0.5 * (p + p.transpose()).eval();
      const double peak = p.cwiseAbs().maxCoeff();
      if (!(peak > 0.0) || !std::isfinite(peak)) {
        p = m;
      } else {
        p /= peak;
      }
    }
    const Vector z = it > kPlainSteps ? Vector(p * v) : y;
    const double norm = z.norm();
    if (!(norm > 0.0)) {
      // Only reachable on input that is not PSD.
      break;
    }
    v = z / norm;
  }
  run.pair = {lambda, std::move(v), max_iter};
  return run;
}

}  // namespace

Vector weighted_mean(const PointSet& points, const WeightVector& w) {
  check_weights(points, w);
  return (points.data().transpose() * as_eigen(w)) / w.mass();
}

Matrix weighted_covariance(const PointSet& points, const WeightVector& w, const Vector& center) {
  check_weights(points, w);
  if (static_cast<std::size_t>(center.size()) != points.d()) {
    throw DomainError("center dimension mismatch");
  }
  const RowMatrix centered = points.data().rowwise() - center.transpose();
  const RowMatrix weighted = centered.array().colwise() * as_eigen(w).array();
  Matrix cov = centered.transpose() * weighted;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov / w.mass();
}

EigenPair top_eigenpair(const Matrix& m, double tol, int max_iter) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError("top_eigenpair needs a non-empty square matrix");
  }
  if (!m.allFinite()) {
    throw DomainError("top_eigenpair: non-finite matrix entries");
  }
  if (!(tol > 0.0) || max_iter < 1) {
    throw DomainError("top_eigenpair: tol must be positive and max_iter >= 1");
  }
  const double magnitude = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * magnitude) {
    throw DomainError("top_eigenpair: matrix is not symmetric");
  }

  const auto d = m.rows();
  const double trace_scale = m.trace() / static_cast<double>(d);

  std::optional<EigenPair> best;
  for (Eigen::Index start = -1; start < d; ++start) {
    Vector v0 = start < 0 ? Vector(Vector::Ones(d) / std::sqrt(static_cast<double>(d)))
                          : Vector(Vector::Unit(d, start));
    PowerRun run = power_iterate(m, std::move(v0), tol, max_iter, trace_scale);
    if (!run.converged) {
      throw ConvergenceError("power iteration did not converge", run.pair.value,
                             run.pair.vector);
    }
    const double scale = std::max({run.pair.value, trace_scale, 0.0});
    const double slack = std::max(10.0 * tol * scale, std::numeric_limits<double>::min());
    if (dominates_spectrum(m, run.pair.value, slack)) {
      best = std::move(run.pair);
      break;
    }
    if (!best || run.pair.value > best->value) {
      best = std::move(run.pair);
    }
  }
  fix_sign(best->vector);
  return *best;
}

double max_eigenvalue(const Matrix& m, double tol) { return top_eigenpair(m, tol).value; }

double min_eigenvalue(const Matrix& m, double tol) {
  const double shift = std::max(m.trace(), 0.0);
  Matrix flipped = -m;
  flipped.diagonal().array() += shift;
  return shift - top_eigenpair(flipped, tol).value;
}

double deviation_from_scaled_identity(const Matrix& sigma, double target, double tol) {
  const double upper = max_eigenvalue(sigma, tol) - target;
  const double lower = target - min_eigenvalue(sigma, tol);
  return std::max({upper, lower, 0.0});
}

}  // namespace robust_mean
