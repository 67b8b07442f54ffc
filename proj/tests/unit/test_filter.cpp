#include <doctest.h>

#include <cmath>

#include "robust_mean/contamination.hpp"
#include "robust_mean/distributions.hpp"
#include "robust_mean/errors.hpp"
#include "robust_mean/filter.hpp"

using namespace robust_mean;

TEST_CASE("largest threshold examples") {
  const std::vector<double> s{5, 4, 3, 2, 1};
  const auto w = WeightVector::uniform(5);
  CHECK(largest_threshold(s, w, 0.2) == 5);
  CHECK(largest_threshold(s, w, 0.3) == 4);
  CHECK(largest_threshold(s, w, 1.0) == 1);
  // ties: lower index first, and the returned score is the tied value
  const std::vector<double> tied{1, 3, 3, 2};
  CHECK(largest_threshold(tied, WeightVector::uniform(4), 0.5) == 3);
  // unnormalized weights: eps is a fraction of the mass
  CHECK(largest_threshold(s, WeightVector({2, 2, 2, 2, 2}), 0.3) == 4);
  const std::vector<double> negative{1, -1};
  CHECK_THROWS_AS(largest_threshold(negative, WeightVector::uniform(2), 0.5), DomainError);
  CHECK_THROWS_AS(largest_threshold(s, WeightVector({0, 0, 0, 0, 0}), 0.5), DomainError);
}

TEST_CASE("filter: identical points exit with zero variance") {
  const auto pts = PointSet::from_rows({{1, 2}, {1, 2}, {1, 2}, {1, 2}});
  const auto r = universal_filter(pts, {.eps = 0.1});
  CHECK(r.trace.iterations == 0);
  CHECK(r.trace.exit == FilterExit::zero_variance);
  CHECK(r.estimate[0] == 1.0);
  CHECK(r.estimate[1] == 2.0);
}

TEST_CASE("filter: hand-simulated 1-d example") {
  const auto pts = PointSet::from_rows({{0}, {0}, {0}, {0}, {100}});
  std::vector<std::vector<double>> seen;
  const auto r = universal_filter(pts, {.eps = 0.2}, [&](std::span<const double> before, std::span<const double> after) {
    seen.emplace_back(before.begin(), before.end());
    seen.emplace_back(after.begin(), after.end());
  });
  // Reference loop by hand: mu(w) = 20, g = (400, 400, 400, 400, 6400); the top point
  // alone carries weight 0.2 so t = m = 6400 and w_5 -> 0; mass 0.8 >= 0.6, the rest
  // are identical so the next pass exits on zero variance.
  REQUIRE(r.trace.steps.size() == 1);
  CHECK(r.trace.steps[0].lambda == doctest::Approx(1600.0));
  CHECK(r.trace.steps[0].threshold == doctest::Approx(6400.0));
  CHECK(r.trace.steps[0].mass_removed == doctest::Approx(0.2));
  CHECK(r.trace.steps[0].support_size == 4);
  CHECK(r.trace.exit == FilterExit::zero_variance);
  CHECK(r.estimate[0] == 0.0);
  CHECK(r.trace.final_weights[4] == 0.0);
  REQUIRE(seen.size() == 2);
  CHECK(seen[1] == std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.0});
}

TEST_CASE("filter preconditions") {
  const auto pts = PointSet::from_rows({{0}, {1}, {2}});
  CHECK_THROWS_AS(universal_filter(PointSet::from_rows({{1}}), {.eps = 0.1}), DomainError);
  CHECK_THROWS_AS(universal_filter(pts, {.eps = 0.5}), DomainError);
  CHECK_THROWS_AS(universal_filter(pts, {.eps = 0.0}), DomainError);
  CHECK_THROWS_AS(universal_filter(pts, {.eps = 0.4}), DomainError);  // (1 - 0.8) * 3 < 1
  CHECK_NOTHROW(universal_filter(pts, {.eps = 1.0 / 3.0}));
  CHECK_THROWS_AS(universal_filter(pts, {.eps = 0.1, .eig_tol = 0.0}), DomainError);
}

TEST_CASE("filter invariants on clean, Huber and strong inputs") {
  int runs = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t d = 1 + seed % 6;
    const std::size_t n = 20 + 37 * (seed % 7);
    const double eps = 0.05 + 0.05 * static_cast<double>(seed % 5);
    const auto gen = DistributionSpec::standard(seed % 2 ? Family::gaussian : Family::radial_pareto, d);
    auto spec = gen;
    if (spec.family == Family::radial_pareto) {
      spec.alpha = 2.5;
    }
    PointSet pts = sample(spec, n, seed);
    if (seed % 3 == 1) {
      pts = attack_strong(pts, {AttackKind::shift_cluster, eps, std::nullopt, std::nullopt}, seed).points;
    } else if (seed % 3 == 2) {
      pts = attack_huber(spec, PointMass{Vector::Constant(static_cast<Eigen::Index>(d), 8.0)}, eps, n, seed).points;
    }
    bool monotone = true;
    std::size_t prev_support = n;
    bool shrinks = true;
    const auto r = universal_filter(pts, {.eps = eps}, [&](std::span<const double> before, std::span<const double> after) {
      std::size_t support = 0;
      for (std::size_t i = 0; i < before.size(); ++i) {
        monotone = monotone && after[i] <= before[i] && after[i] >= 0.0;
        support += after[i] > 0.0;
      }
      shrinks = shrinks && support < prev_support;
      prev_support = support;
    });
    CHECK(monotone);
    CHECK(shrinks);
    CHECK(r.trace.iterations <= n);
    for (const auto& step : r.trace.steps) {
      CHECK(step.mass_removed > 0.0);
    }
    if (r.trace.exit == FilterExit::mass_threshold) {
      CHECK(r.trace.final_weights.mass() >= 1.0 - 3.0 * eps - 1.0 / static_cast<double>(n));
    }
    ++runs;
  }
  CHECK(runs == 60);
}

TEST_CASE("filter translation and scale equivariance") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t d = 2 + seed % 4;
    auto clean = sample(DistributionSpec::standard(Family::gaussian, d), 300, seed);
    const auto pts = attack_strong(clean, {AttackKind::shift_cluster, 0.1, std::nullopt, std::nullopt}, seed).points;
    const FilterConfig cfg{.eps = 0.1};
    const Vector base = universal_filter(pts, cfg).estimate;

    Vector b = Vector::LinSpaced(static_cast<Eigen::Index>(d), -50.0, 75.0);
    const Vector moved = universal_filter(pts.translated(b), cfg).estimate;
    CHECK((moved - (base + b)).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + b.norm()));

    for (double c : {1e-3, 1.0, 1e3}) {
      const Vector scaled = universal_filter(pts.scaled(c), cfg).estimate;
      CHECK((scaled - c * base).norm() <= 1e-8 * c * std::max(1.0, base.norm()));
    }
  }
}

TEST_CASE("filter on clean Gaussian data stays near the mean") {
  int good = 0;
  const double bound = 4.0 * std::sqrt(10.0 / 5000.0) + 2.0 * std::sqrt(0.1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pts = sample(DistributionSpec::standard(Family::gaussian, 10), 5000, 1000 + seed);
    good += universal_filter(pts, {.eps = 0.1}).estimate.norm() <= bound;
  }
  CHECK(good >= 45);
}

TEST_CASE("filter removes a far cluster that moves the mean by 5") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RowMatrix x = sample(DistributionSpec::standard(Family::gaussian, 10), 5000, 2000 + seed).data();
    for (Eigen::Index i = 0; i < 500; ++i) {
      x.row(i).setZero();
      x(i, 0) = 50.0;
    }
    const PointSet pts(x);
    const Vector naive = pts.data().colwise().mean().transpose();
    CHECK(naive.norm() == doctest::Approx(5.0).epsilon(0.05));
    good += universal_filter(pts, {.eps = 0.1}).estimate.norm() <= 1.0;
  }
  CHECK(good >= 45);
}

TEST_CASE("prune examples") {
  int clean_runs = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pts = sample(DistributionSpec::standard(Family::gaussian, 5), 2000, seed);
    clean_runs += prune(pts, 0.1, 10.0).removed.empty();
  }
  CHECK(clean_runs >= 49);

  RowMatrix x = sample(DistributionSpec::standard(Family::gaussian, 3), 200, 9).data();
  x(17, 0) = 1e6;
  const auto r = prune(PointSet(x), 0.1, 10.0);
  CHECK(r.removed == IndexList{17});
  CHECK(r.kept.n() == 199);

  const auto same = PointSet::from_rows({{1, 1}, {1, 1}, {1, 1}});
  CHECK(prune(same, 0.2, 10.0).removed.empty());
  CHECK_THROWS_AS(prune(same, 0.0, 10.0), DomainError);

  // budget: at most floor(2 eps n) points go, the farthest first
  const auto spread = PointSet::from_rows({{0}, {0}, {0}, {0}, {0}, {0}, {0}, {0}, {100}, {200}});
  const auto capped = prune(spread, 0.05, 1.0);
  CHECK(capped.removed == IndexList{9});
}

TEST_CASE("trim to match examples") {
  const auto pts = PointSet::from_rows({{0}, {1}, {2}, {-1}, {40}});
  CHECK(trim_to_match(pts, 0.0).data() == pts.data());
  const auto t = trim_to_match(pts, 0.2);
  REQUIRE(t.n() == 4);
  CHECK(t.data().col(0).maxCoeff() == 2.0);
  const auto same = PointSet::from_rows({{3}, {3}, {3}, {3}, {3}});
  const auto kept = trim_to_match(same, 0.4);
  CHECK(kept.n() == 3);
  CHECK_THROWS_AS(trim_to_match(same, 1.0), DomainError);
}

TEST_CASE("trim keeps the lower index on ties") {
  // 5 and -5 are tied for farthest from the median 0; the higher index goes.
  const auto pts = PointSet::from_rows({{5}, {0}, {0}, {0}, {-5}});
  const auto t = trim_to_match(pts, 0.2);
  CHECK(t.data()(0, 0) == 5.0);
  CHECK(t.data().col(0).minCoeff() == 0.0);
}

TEST_CASE("coordinate median uses the midpoint for even n") {
  const auto m = coordinate_median(PointSet::from_rows({{0, 4}, {1, 1}}));
  CHECK(m[0] == 0.5);
  CHECK(m[1] == 2.5);
}
