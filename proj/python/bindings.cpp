#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robust_mean/baselines.hpp"
#include "robust_mean/contamination.hpp"
#include "robust_mean/distributions.hpp"
#include "robust_mean/errors.hpp"
#include "robust_mean/filter.hpp"
#include "robust_mean/harness.hpp"
#include "robust_mean/json_io.hpp"
#include "robust_mean/linalg.hpp"
#include "robust_mean/mom.hpp"
#include "robust_mean/stability.hpp"

namespace py = pybind11;
using namespace robust_mean;

namespace {

PointSet to_points(const RowMatrix& x) { return PointSet(x); }

py::dict certificate_dict(const StabilityCertificate& cert) {
  py::dict out;
  out["verdict"] = to_string(cert.verdict);
  out["eps"] = cert.eps;
  out["delta"] = cert.certified_delta ? py::cast(*cert.certified_delta) : py::none();
  out["checker"] = to_string(cert.checker);
  out["witness"] = cert.witness ? py::cast(*cert.witness) : py::none();
  return out;
}

py::list steps_list(const FilterTrace& trace) {
  py::list steps;
  for (const auto& s : trace.steps) {
    py::dict step;
    step["lambda"] = s.lambda;
    step["threshold"] = s.threshold;
    step["mass_removed"] = s.mass_removed;
    step["support_size"] = s.support_size;
    steps.append(step);
  }
  return steps;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Outlier-robust mean estimation";
  m.attr("__version__") = kVersion;

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def(
      "weighted_mean",
      [](const RowMatrix& x, std::vector<double> w) { return weighted_mean(to_points(x), WeightVector(std::move(w))); },
      py::arg("points"), py::arg("weights"));

  m.def(
      "top_eigenpair",
      [](const Matrix& a, double tol, int max_iter) {
        const auto pair = top_eigenpair(a, tol, max_iter);
        return py::make_tuple(pair.value, pair.vector, pair.iterations);
      },
      py::arg("matrix"), py::arg("tol") = kDefaultEigTol, py::arg("max_iter") = kDefaultEigMaxIter);

  m.def("empirical_mean", [](const RowMatrix& x) { return empirical_mean(to_points(x)); }, py::arg("points"));
  m.def("coord_median", [](const RowMatrix& x) { return coord_median(to_points(x)); }, py::arg("points"));
  m.def(
      "geometric_median", [](const RowMatrix& x, double tol) { return geometric_median(to_points(x), tol); },
      py::arg("points"), py::arg("tol") = 1e-8);

  m.def(
      "universal_filter",
      [](const RowMatrix& x, double eps, double eig_tol) {
        FilterConfig cfg;
        cfg.eps = eps;
        cfg.eig_tol = eig_tol;
        const auto r = universal_filter(to_points(x), cfg);
        py::dict out;
        out["estimate"] = r.estimate;
        const auto w = r.trace.final_weights.values();
        out["weights"] = std::vector<double>(w.begin(), w.end());
        out["iterations"] = r.trace.iterations;
        out["exit"] = to_string(r.trace.exit);
        out["steps"] = steps_list(r.trace);
        return out;
      },
      py::arg("points"), py::arg("eps"), py::arg("eig_tol") = kDefaultEigTol);

  m.def(
      "mom_filter_estimate",
      [](const RowMatrix& x, double eps, double tau, double c0, double eps_filter, std::uint64_t seed) {
        MomConfig cfg;
        cfg.eps = eps;
        cfg.tau = tau;
        cfg.c0 = c0;
        cfg.eps_filter = eps_filter;
        const auto r = mom_filter_estimate(to_points(x), cfg, seed);
        py::dict out;
        out["estimate"] = r.estimate;
        out["k"] = r.diagnostics.k;
        out["m"] = r.diagnostics.m;
        out["dropped"] = r.diagnostics.dropped;
        out["used_filter"] = r.diagnostics.used_filter;
        out["theoretical_error_bound"] = r.diagnostics.theoretical_error_bound;
        return out;
      },
      py::arg("points"), py::arg("eps"), py::arg("tau") = 0.01, py::arg("c0") = 5.0, py::arg("eps_filter") = 0.02,
      py::arg("seed") = 0);

  m.def(
      "sample",
      [](const std::string& family, std::size_t n, std::size_t d, std::uint64_t seed, double cov_scale, double shape,
         std::optional<Vector> mu) {
        auto spec = DistributionSpec::standard(family_from_string(family), d, cov_scale, shape);
        if (mu) {
          spec.mu = *mu;
        }
        return sample(spec, n, seed).data();
      },
      py::arg("family"), py::arg("n"), py::arg("d"), py::arg("seed") = 0, py::arg("cov_scale") = 1.0,
      py::arg("shape") = 0.0, py::arg("mu") = py::none());

  m.def(
      "attack_strong",
      [](const RowMatrix& x, const std::string& kind, double eps, std::uint64_t seed, std::optional<double> magnitude,
         std::optional<Vector> direction) {
        const auto r = attack_strong(to_points(x), {attack_kind_from_string(kind), eps, magnitude, direction}, seed);
        return py::make_tuple(r.points.data(), r.corrupted_indices);
      },
      py::arg("points"), py::arg("kind"), py::arg("eps"), py::arg("seed") = 0, py::arg("magnitude") = py::none(),
      py::arg("direction") = py::none());

  m.def(
      "exact_stability_check",
      [](const RowMatrix& x, const Vector& mu, double sigma2, double eps, double delta) {
        return certificate_dict(exact_stability_check(to_points(x), {eps, delta, mu, sigma2}));
      },
      py::arg("points"), py::arg("mu"), py::arg("sigma2"), py::arg("eps"), py::arg("delta"));

  m.def(
      "sufficient_check_cov",
      [](const RowMatrix& x, const Vector& mu, double sigma2, double eps, double eps_prime) {
        return certificate_dict(sufficient_check_cov(to_points(x), mu, sigma2, eps, eps_prime));
      },
      py::arg("points"), py::arg("mu"), py::arg("sigma2"), py::arg("eps"), py::arg("eps_prime"));

  m.def(
      "fit_loglog_slope",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const auto fit = fit_loglog_slope(xs, ys);
        return py::make_tuple(fit.slope, fit.intercept, fit.r2);
      },
      py::arg("xs"), py::arg("ys"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, std::size_t workers) {
        const auto cfg = config_from_json(nlohmann::json::parse(config_json));
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(cfg, workers);
        }
        return report_to_json(report).dump();
      },
      py::arg("config_json"), py::arg("workers") = 1,
      "Runs an experiment from a JSON config string and returns the report as a JSON string.");
}
