#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "robust_mean/distributions.hpp"
#include "robust_mean/errors.hpp"
#include "robust_mean/mom.hpp"

using namespace robust_mean;

TEST_CASE("bucketize examples") {
  const auto pts = sample(DistributionSpec::standard(Family::gaussian, 3), 7, 1);
  const auto one = bucketize(pts, 1, 5);
  REQUIRE(one.means.n() == 1);
  CHECK((one.means.row(0).transpose() - pts.data().colwise().mean().transpose()).norm() < 1e-14);

  const auto all = bucketize(pts, 7, 5);
  CHECK(all.plan.m == 1);
  for (std::size_t b = 0; b < 7; ++b) {
    CHECK(all.means.row(b) == pts.row(all.plan.order[b]));
  }

  const auto three = bucketize(pts, 3, 5);
  CHECK(three.plan.k == 3);
  CHECK(three.plan.m == 2);
  CHECK(three.plan.dropped == 1);
  Vector retained = Vector::Zero(3);
  for (std::size_t j = 0; j < 6; ++j) {
    retained += pts.row(three.plan.order[j]).transpose();
  }
  retained /= 6.0;
  const Vector mean_of_means = three.means.data().colwise().mean().transpose();
  CHECK((mean_of_means - retained).norm() < 1e-14);

  CHECK_THROWS_AS(bucketize(pts, 0, 1), DomainError);
  CHECK_THROWS_AS(bucketize(pts, 8, 1), DomainError);
}

TEST_CASE("bucketize partition and mean identity across seeds") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 10 + 13 * (seed % 9);
    const std::size_t k = 1 + seed % n;
    const auto pts = sample(DistributionSpec::standard(Family::multivariate_t, 2, 1.0, 3.0), n, seed).translated(Vector::Constant(2, 1e3));
    const auto b = bucketize(pts, k, seed);
    CHECK(b.plan.k * b.plan.m + b.plan.dropped == n);
    CHECK(b.plan.m >= 1);
    std::set<std::size_t> used(b.plan.order.begin(), b.plan.order.begin() + static_cast<std::ptrdiff_t>(k * b.plan.m));
    CHECK(used.size() == k * b.plan.m);
    IndexList sorted = b.plan.order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(sorted[i] == i);
    }
    Vector retained = Vector::Zero(2);
    for (std::size_t j = 0; j < k * b.plan.m; ++j) {
      retained += pts.row(b.plan.order[j]).transpose();
    }
    retained /= static_cast<double>(k * b.plan.m);
    const Vector mm = b.means.data().colwise().mean().transpose();
    CHECK((mm - retained).norm() <= 1e-12 * retained.norm());
  }
}

TEST_CASE("permutation depends only on seed and n") {
  const auto a = sample(DistributionSpec::standard(Family::gaussian, 2), 40, 1);
  const auto b = sample(DistributionSpec::standard(Family::gaussian, 2), 40, 2).scaled(7.0);
  CHECK(bucketize(a, 6, 99).plan.order == bucketize(b, 6, 99).plan.order);
  CHECK(bucketize(a, 6, 99).plan.order != bucketize(a, 6, 100).plan.order);
}

TEST_CASE("choose_k examples") {
  CHECK(choose_k(1000, 0.0, std::exp(-10.0), 5.0) == 50);
  CHECK(choose_k(100000, 0.1, 0.5, 5.0) == 50003);  // floor(5 (ln 2 + 10000)) = 50003
  CHECK(choose_k(10, 0.0, 0.9, 1.0) == 1);
  CHECK(choose_k(10, 0.4, 0.01, 5.0) == 10);
  CHECK_THROWS_AS(choose_k(10, 0.5, 0.1, 5.0), DomainError);
  CHECK_THROWS_AS(choose_k(10, 0.1, 1.0, 5.0), DomainError);
}

TEST_CASE("mom filter: small k falls back to the mean of bucket means") {
  const auto pts = sample(DistributionSpec::standard(Family::gaussian, 2), 40, 3);
  MomConfig cfg;
  cfg.eps = 0.0;
  cfg.tau = 0.9;
  cfg.c0 = 1.0;
  const auto r = mom_filter_estimate(pts, cfg, 4);
  CHECK(r.diagnostics.k == 1);
  CHECK_FALSE(r.diagnostics.used_filter);
  CHECK_FALSE(r.trace);
  CHECK((r.estimate - pts.data().colwise().mean().transpose()).norm() < 1e-14);
  CHECK_THROWS_AS(mom_filter_estimate(PointSet::from_rows({{1}, {2}, {3}}), cfg, 0), DomainError);
}

TEST_CASE("mom filter: identical points are returned for every k") {
  const auto pts = PointSet::from_rows(std::vector<std::vector<double>>(50, {2.5, -1.0}));
  for (double eps : {0.0, 0.05, 0.2, 0.45}) {
    MomConfig cfg;
    cfg.eps = eps;
    const auto r = mom_filter_estimate(pts, cfg, 1);
    CHECK(r.estimate[0] == doctest::Approx(2.5));
    CHECK(r.estimate[1] == doctest::Approx(-1.0));
  }
}

TEST_CASE("mom filter: determinism and equivariance at a fixed seed") {
  const auto pts = sample(DistributionSpec::standard(Family::multivariate_t, 4, 1.0, 3.0), 800, 21);
  MomConfig cfg;
  cfg.eps = 0.05;
  const auto a = mom_filter_estimate(pts, cfg, 8);
  const auto b = mom_filter_estimate(pts, cfg, 8);
  CHECK(a.estimate == b.estimate);
  CHECK(a.diagnostics.k == b.diagnostics.k);
  CHECK(a.diagnostics.filter_iterations == b.diagnostics.filter_iterations);
  CHECK(a.diagnostics.theoretical_error_bound == b.diagnostics.theoretical_error_bound);
  CHECK(a.diagnostics.used_filter);

  const Vector shift = Vector::LinSpaced(4, -30.0, 90.0);
  const auto moved = mom_filter_estimate(pts.translated(shift), cfg, 8);
  CHECK((moved.estimate - (a.estimate + shift)).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + shift.norm()));
  for (double c : {1e-3, 1e3}) {
    const auto scaled = mom_filter_estimate(pts.scaled(c), cfg, 8);
    CHECK((scaled.estimate - c * a.estimate).norm() <= 1e-8 * c * std::max(1.0, a.estimate.norm()));
  }
}

TEST_CASE("mom filter on clean Gaussian data meets its rate") {
  std::vector<double> errors;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pts = sample(DistributionSpec::standard(Family::gaussian, 5), 5000, 300 + seed);
    MomConfig cfg;
    cfg.eps = 0.05;
    cfg.tau = 0.01;
    errors.push_back(mom_filter_estimate(pts, cfg, seed).estimate.norm());
  }
  std::nth_element(errors.begin(), errors.begin() + 49, errors.end());
  CHECK(errors[49] <= 2.0 * (std::sqrt(5.0 / 5000.0) + std::sqrt(0.05)));
}
