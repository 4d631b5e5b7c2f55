#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "generators.hpp"
#include "mtrend/estimators.hpp"
#include "mtrend/stochastic.hpp"
#include "oracles.hpp"

using namespace mtrend;
using doctest::Approx;
using Vec = std::vector<double>;

namespace {
PenaltySpec with_lambda(double lambda) {
  PenaltySpec p;
  p.lambda = lambda;
  return p;
}
BoundarySpec with_m(std::size_t m) {
  BoundarySpec b;
  b.m = m;
  return b;
}
}  // namespace

TEST_CASE("isotonic_trend examples") {
  CHECK(isotonic_trend(Vec{3, 1}).mu_tilde == Vec{2, 2});
  CHECK(isotonic_trend(Vec{1, 2, 3}).mu_tilde == Vec{1, 2, 3});
  const TrendFit fit = isotonic_trend(Vec{2, 1, 4, 3, 5});
  CHECK(fit.mu_tilde == Vec{1.5, 1.5, 3.5, 3.5, 5});
  CHECK(fit.knots == std::vector<std::size_t>{0, 2, 4, 5});
  CHECK(fit.at(3) == 3.5);
  CHECK_THROWS(isotonic_trend(Vec{}));
}

TEST_SUITE("penalized last point") {
  TEST_CASE("examples") {
    CHECK(penalized_last(Vec{5}, with_lambda(0)) == 5);
    CHECK(penalized_last(Vec{1, 2, 3}, with_lambda(1)) == Approx(5.0 / 3));
    CHECK(penalized_last_detail(Vec{1, 2, 3}, with_lambda(1)).start == 2);
  }

  TEST_CASE("lambda defaults to alpha n^(1/3)") {
    PenaltySpec p;
    p.alpha = 2.0;
    CHECK(p.lambda_for(27) == Approx(6.0));
    CHECK(with_lambda(0.5).lambda_for(1000) == 0.5);
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(with_lambda(-1).validate(), std::invalid_argument);
  }

  TEST_CASE("ties report the smallest start") {
    // Suffix sums 0, 0, 0 over lengths 3, 2, 1: all equal to 0 at lambda 1.
    CHECK(penalized_last_detail(Vec{1, -1, 0}, with_lambda(1)).start == 1);
  }

  TEST_CASE("lambda = 0 equals the last isotonic value exactly") {
    testgen::Gen g(31);
    for (int c = 0; c < 300; ++c) {
      CAPTURE(c);
      const Vec y = c % 4 == 0 ? g.tied_series(g.size(1, 100)) : g.series(g.size(1, 100));
      CHECK(penalized_last(y, with_lambda(0)) == isotonic_trend(y).mu_tilde.back());
    }
  }

  TEST_CASE("agrees with the naive formula") {
    testgen::Gen g(32);
    for (int c = 0; c < 200; ++c) {
      const Vec y = g.series(g.size(1, 60));
      const double lambda = g.uniform(0, 5);
      CHECK(oracle::close(penalized_last(y, with_lambda(lambda)), oracle::penalized(y, lambda), 1e-12));
    }
  }

  TEST_CASE("nonincreasing and continuous in lambda for positive data") {
    testgen::Gen g(33);
    for (int c = 0; c < 100; ++c) {
      CAPTURE(c);
      const Vec y = g.series(g.size(1, 60), 0.01, 5.0);
      double prev = penalized_last(y, with_lambda(0));
      for (double lambda = 0.25; lambda <= 10.0; lambda += 0.25) {
        const double v = penalized_last(y, with_lambda(lambda));
        CHECK(v <= prev);
        // Lipschitz in lambda: |d/dlambda S/(len+lambda)| <= max |S| / len^2.
        CHECK(prev - v <= 0.25 * 5.0 + 1e-12);
        const double nudged = penalized_last(y, with_lambda(lambda + 1e-9));
        CHECK(std::abs(nudged - v) < 1e-7);
        prev = v;
      }
    }
  }
}

TEST_SUITE("boundary corrected last point") {
  TEST_CASE("examples") {
    CHECK(boundary_corrected_last(Vec{2, 1, 4, 3, 5}, with_m(3)) == 3.5);
    CHECK_THROWS_AS(boundary_corrected_last(Vec{1, 2}, with_m(0)), std::out_of_range);
    CHECK_THROWS_AS(boundary_corrected_last(Vec{1, 2}, with_m(3)), std::out_of_range);
  }

  TEST_CASE("offset rule follows the 1 - ell n^(-1/3) evaluation point") {
    // floor(n (1 - ell n^(-1/3))) = n - ceil(ell n^(2/3))
    BoundarySpec b;
    CHECK(b.m_for(150) == 121);
    CHECK(b.m_for(1000) == 900);
    b.ell = 0.5;
    CHECK(b.m_for(1000) == 950);
    b.ell = 2.0;
    CHECK_THROWS_AS(b.m_for(5), std::out_of_range);
    b.ell = -1.0;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  }

  TEST_CASE("m = n equals the last isotonic value exactly") {
    testgen::Gen g(34);
    for (int c = 0; c < 300; ++c) {
      const Vec y = g.series(g.size(1, 100));
      CHECK(boundary_corrected_last(y, with_m(y.size())) == isotonic_trend(y).mu_tilde.back());
    }
  }
}

TEST_CASE("location equivariance of all three estimators") {
  testgen::Gen g(35);
  for (int c = 0; c < 200; ++c) {
    CAPTURE(c);
    const Vec y = g.series(g.size(30, 100));
    const double shift = g.uniform(-10, 10);
    Vec z = y;
    for (auto& v : z) v += shift;
    const TrendFit a = isotonic_trend(y), b = isotonic_trend(z);
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(b.mu_tilde[k] == Approx(a.mu_tilde[k] + shift).epsilon(1e-12));
    // The penalty divides by len + lambda, so only lambda = 0 is shift-equivariant.
    CHECK(penalized_last(z, with_lambda(0)) == Approx(penalized_last(y, with_lambda(0)) + shift).epsilon(1e-12));
    const BoundarySpec bs;
    CHECK(boundary_corrected_last(z, bs) == Approx(boundary_corrected_last(y, bs) + shift).epsilon(1e-12));
  }
}

TEST_SUITE("xi statistic") {
  TEST_CASE("snapping to k / n") {
    CHECK(snap_index(150, 1.0 / 3) == 50);
    CHECK(snap_index(150, 0.5) == 75);
    CHECK(snap_index(150, 2.0 / 3) == 100);
    CHECK(snap_index(150, 1.0) == 150);
    CHECK(snap_index(7, 0.5) == 3);
    CHECK_THROWS_AS(snap_index(150, 0.001), std::out_of_range);
    CHECK_THROWS_AS(snap_index(150, 1.1), std::out_of_range);
    CHECK_THROWS_AS(snap_index(150, 0.0), std::out_of_range);
  }

  TEST_CASE("kappa") {
    CHECK(interior_kappa(0.1875, 1.0) == Approx(0.45428).epsilon(1e-5));
    CHECK(interior_kappa(0.1875, 2.0 * (2.0 / 3)) == Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(interior_kappa(0.1875, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(interior_kappa(0.0, 1.0), std::invalid_argument);
  }

  TEST_CASE("statistic is invariant under snapping") {
    testgen::Gen g(36);
    const auto phi = TrendFunction::identity();
    for (int c = 0; c < 100; ++c) {
      const std::size_t n = g.size(10, 200);
      const Vec y = g.series(n);
      const double t = g.uniform(std::max(0.05, 1.0 / static_cast<double>(n)), 1.0);
      const double snapped = static_cast<double>(snap_index(n, t)) / static_cast<double>(n);
      const XiStatistic a = xi_statistic(y, phi, t, 0.5);
      const XiStatistic b = xi_statistic(y, phi, snapped, 0.5);
      CHECK(a.xi == b.xi);
      CHECK(*a.scaled == *b.scaled);
      CHECK(a.index == b.index);
    }
  }

  TEST_CASE("noiseless identity trend has only discretisation bias") {
    const std::size_t n = 100;
    Vec y(n);
    for (std::size_t k = 1; k <= n; ++k) y[k - 1] = static_cast<double>(k) / n;
    const XiStatistic xi = xi_statistic(y, TrendFunction::identity(), 0.5, std::nullopt);
    CHECK(std::abs(xi.xi) <= std::cbrt(double(n)) / n);
    CHECK_FALSE(xi.scaled.has_value());
  }

  TEST_CASE("scaled output requires a positive derivative") {
    const auto flat = TrendFunction::custom("flat", [](double) { return 1.0; }, [](double) { return 0.0; });
    CHECK_NOTHROW(xi_statistic(Vec{1, 2, 3, 4}, flat, 0.5, std::nullopt));
    CHECK_THROWS_AS(xi_statistic(Vec{1, 2, 3, 4}, flat, 0.5, 0.3), std::invalid_argument);
  }

  TEST_CASE("scaled value divides by kappa at the snapped point") {
    const Vec y{0.1, 0.5, 0.2, 0.9, 0.7, 1.1};
    const auto sq = TrendFunction::square();
    const XiStatistic xi = xi_statistic(y, sq, 0.5, 0.4);
    CHECK(xi.index == 3);
    CHECK(*xi.kappa == Approx(interior_kappa(0.16, 1.0)));
    CHECK(*xi.scaled == Approx(xi.xi / *xi.kappa));
    CHECK(xi.xi == Approx(std::cbrt(6.0) * (isotonic_trend(y).at(3) - 0.25)));
  }
}

TEST_CASE("trend functions") {
  CHECK(TrendFunction::from_name("sqrt")(0.25) == 0.5);
  CHECK(TrendFunction::from_name("t")(0.3) == 0.3);
  CHECK(TrendFunction::from_name("t^2").derivative(0.5) == 1.0);
  CHECK(TrendFunction::from_name("identity").kind() == TrendKind::identity);
  CHECK_THROWS_AS(TrendFunction::from_name("cubic"), std::invalid_argument);
  CHECK_THROWS_AS(TrendFunction::custom("down", [](double t) { return -t; }, [](double) { return -1.0; }),
                  std::invalid_argument);
}
