#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mtrend/limits.hpp"

using namespace mtrend;
using doctest::Approx;
using Vec = std::vector<double>;

namespace {

double mean(const Vec& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd(const Vec& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

SamplerOptions single_thread() {
  SamplerOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("layout") {
    const BmGrid g = default_chernoff_grid();
    CHECK(g.size() == 5001);
    CHECK(g.zero_index() == 2500);
    CHECK(g.abscissa(g.zero_index()) == 0.0);
    CHECK(g.abscissa(0) == Approx(-2.5));
    const BmGrid one_sided{0.01, 0.0, 1.0};
    CHECK(one_sided.size() == 101);
    CHECK(one_sided.zero_index() == 0);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(BmGrid({0.0, -1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(BmGrid({0.1, 0.5, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(BmGrid({0.1, -1, -0.5}).validate(), std::invalid_argument);
  }
}

TEST_SUITE("brownian motion") {
  TEST_CASE("starts at zero") {
    Stream s(1);
    const BmGrid g{0.01, -1, 2};
    for (int r = 0; r < 10; ++r) CHECK(two_sided_bm(g, s)[g.zero_index()] == 0.0);
  }

  TEST_CASE("variance and covariance identities") {
    const BmGrid g{0.01, -1.0, 2.0};
    const std::size_t z = g.zero_index();
    const std::size_t at_m1 = z - 100, at_1 = z + 100, at_2 = z + 200;
    const int reps = 10000;
    Vec w1(reps), w2(reps), wm1(reps);
    for (int r = 0; r < reps; ++r) {
      Stream s = Stream::derive(5, static_cast<std::uint64_t>(r));
      const Vec w = two_sided_bm(g, s);
      w1[r] = w[at_1];
      w2[r] = w[at_2];
      wm1[r] = w[at_m1];
    }
    auto cov = [&](const Vec& a, const Vec& b) {
      double s = 0;
      for (int r = 0; r < reps; ++r) s += a[r] * b[r];
      return s / reps;
    };
    // SE of a sample second moment of N(0, v) is v sqrt(2 / reps).
    CHECK(std::abs(cov(w1, w1) - 1.0) < 3 * std::sqrt(2.0 / reps));
    CHECK(std::abs(cov(w2, w2) - 2.0) < 3 * 2 * std::sqrt(2.0 / reps));
    CHECK(std::abs(cov(wm1, wm1) - 1.0) < 3 * std::sqrt(2.0 / reps));
    CHECK(std::abs(cov(w1, w2) - 1.0) < 3 * std::sqrt(3.0 / reps));
    CHECK(std::abs(cov(w1, wm1)) < 3 * std::sqrt(1.0 / reps));
  }
}

TEST_SUITE("chernoff") {
  TEST_CASE("frozen values") {
    const LimitSample s = chernoff_sample(4, default_chernoff_grid(), 7, single_thread());
    CHECK(s.values == Vec{-1.232, 0.94400000000000006, 2.48, -1.8200000000000001});
  }

  TEST_CASE("symmetry") {
    const std::size_t reps = 20000;
    const LimitSample s = chernoff_sample(reps, BmGrid{2e-3, -2.5, 2.5}, 11);
    REQUIRE(s.values.size() == reps);
    CHECK(std::abs(mean(s.values)) < 3 * sd(s.values) / std::sqrt(double(reps)));
    const EmpiricalCdf F(s.values);
    const double se = std::sqrt(0.25 / reps);
    for (double z : {0.25, 0.5, 1.0, 1.5, 2.0}) {
      CAPTURE(z);
      // F(z) + F(-z) = 1 up to the atom at -z and MC error.
      CHECK(std::abs(F(z) + F(-z - 1e-12) - 1.0) < 3 * 2 * se);
    }
    CHECK(std::abs(F(0.0) - 0.5) < 3 * se + 1.0 / reps * 10);
  }

  TEST_CASE("values lie on the doubled grid") {
    const LimitSample s = chernoff_sample(200, default_chernoff_grid(), 3);
    for (double v : s.values) CHECK(std::abs(v / 2e-3 - std::round(v / 2e-3)) < 1e-6);
    CHECK(s.diagnostics.lower_hit_fraction + s.diagnostics.upper_hit_fraction < 0.01);
  }

  TEST_CASE("narrow window triggers widening") {
    const LimitSample s = chernoff_sample(500, BmGrid{1e-2, -0.3, 0.3}, 3);
    CHECK(s.diagnostics.widenings > 0);
    CHECK(s.grid.upper > 0.3);
    SamplerOptions fixed;
    fixed.auto_widen = false;
    const LimitSample w = chernoff_sample(500, BmGrid{1e-2, -0.3, 0.3}, 3, fixed);
    CHECK(w.diagnostics.warning);
    CHECK(w.grid.upper == 0.3);
  }

  TEST_CASE("independent of the worker count") {
    SamplerOptions three;
    three.threads = 3;
    const auto a = chernoff_sample(301, BmGrid{5e-3, -2.5, 2.5}, 99, single_thread());
    const auto b = chernoff_sample(301, BmGrid{5e-3, -2.5, 2.5}, 99, three);
    CHECK(a.values == b.values);
    CHECK(a.locations == b.locations);
  }

  TEST_CASE("quantile table") {
    const Vec ps{0.1, 0.5, 0.9};
    const QuantileTable q = chernoff_quantiles(ps, 4000, BmGrid{2e-3, -2.5, 2.5}, 1);
    CHECK(std::is_sorted(q.quantiles.begin(), q.quantiles.end()));
    CHECK(std::abs(q.at(0.5)) < 0.06);
    CHECK(std::abs(q.at(0.1) + q.at(0.9)) < 0.1);
    CHECK_THROWS_AS(q.at(0.3), std::out_of_range);
    const Vec bad{0.5, 0.4};
    CHECK_THROWS_AS(chernoff_quantiles(bad, 10, default_chernoff_grid(), 1), std::invalid_argument);
  }
}

TEST_SUITE("boundary law") {
  TEST_CASE("vanishing sigma gives -ell phi'(1)") {
    const BmGrid g = default_boundary_grid(1.0, 1.0, 1e-12);
    const LimitSample s = boundary_limit_sample(1.0, 1.0, 1e-12, 20, g, 2);
    // The minorant of a convex grid function is itself, so the slope at 0 is
    // that of the chord next to 0: within one step of 0.
    for (double v : s.values) CHECK(std::abs(v + 1.0) <= g.step * 1.0 + 1e-9);
  }

  TEST_CASE("Brownian scaling holds path by path") {
    // With a = (2 sigma / phi')^(2/3) and kappa = (sigma^2 phi' / 2)^(1/3),
    // value + ell phi' = kappa S(ell / a), S the law for sigma = 1, phi' = 2.
    // Grids with equal step / a and window / a share every normal draw.
    const double sigma = 0.25, phi1p = 1.0;
    const double a = std::cbrt(std::pow(2 * sigma / phi1p, 2));
    const double kappa = std::cbrt(0.5 * sigma * sigma * phi1p);
    const double L = 1.5;
    const BmGrid unit{1e-3, -5.0, L};
    const BmGrid scaled{1e-3 * a, -5.0 * a, L * a};
    SamplerOptions fixed;
    fixed.auto_widen = false;
    const LimitSample base = boundary_limit_sample(L, 2.0, 1.0, 300, unit, 8, fixed);
    const LimitSample other = boundary_limit_sample(L * a, phi1p, sigma, 300, scaled, 8, fixed);
    REQUIRE(base.grid.size() == other.grid.size());
    for (std::size_t r = 0; r < base.values.size(); ++r) {
      CAPTURE(r);
      const double lhs = (other.values[r] + L * a * phi1p) / kappa;
      const double rhs = base.values[r] + L * 2.0;
      CHECK(lhs == Approx(rhs).epsilon(1e-8).scale(1.0));
    }
  }

  TEST_CASE("large ell approaches the kappa-scaled Chernoff law") {
    const double sigma = 0.433, phi1p = 1.0, ell = 5.0;
    const double kappa = std::cbrt(0.5 * sigma * sigma * phi1p);
    const std::size_t reps = 6000;
    const LimitSample b = boundary_limit_sample(ell, phi1p, sigma, reps,
                                                default_boundary_grid(ell, phi1p, sigma), 21);
    Vec normalized(b.values);
    for (auto& v : normalized) v = (v + ell * phi1p) / kappa;
    const LimitSample c = chernoff_sample(reps, default_chernoff_grid(), 22);
    const EmpiricalCdf Fb(normalized), Fc(c.values);
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CAPTURE(p);
      CHECK(Fb.quantile(p) == Approx(Fc.quantile(p)).scale(1.0).epsilon(0.1));
    }
  }

  TEST_CASE("parameter validation") {
    const BmGrid g{1e-3, -2, 1};
    CHECK_THROWS_AS(boundary_limit_sample(2.0, 1, 1, 10, g, 1), std::invalid_argument);
    CHECK_THROWS_AS(boundary_limit_sample(0.0, 1, 1, 10, g, 1), std::invalid_argument);
    CHECK_THROWS_AS(boundary_limit_sample(1.0, 1, 1, 10, BmGrid{1e-3, 0, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(boundary_limit_sample(1.0, -1, 1, 10, g, 1), std::invalid_argument);
  }
}

TEST_SUITE("penalized law") {
  TEST_CASE("dominated by the path bound without the penalty term") {
    const double sigma = 0.25, alpha = 1.0, phi1 = 1.0, phi1p = 1.0;
    const LimitSample s = penalized_limit_sample(alpha, phi1, phi1p, sigma, 200,
                                                 default_penalized_grid(alpha, phi1, phi1p, sigma), 4);
    for (std::size_t r = 0; r < s.reps; ++r) {
      Stream stream = Stream::derive(s.seed, r);
      const Vec w = two_sided_bm(s.grid, stream);
      double bound = -INFINITY;
      for (std::size_t i = 1; i < w.size(); ++i) {
        const double t = s.grid.abscissa(i);
        bound = std::max(bound, sigma * w[i] / t - 0.5 * phi1p * t);
      }
      CHECK(s.values[r] < bound);
    }
  }

  TEST_CASE("supremum is attained away from the first grid point") {
    const LimitSample s = penalized_limit_sample(1.0, 1.0, 1.0, 0.25, 2000,
                                                 default_penalized_grid(1.0, 1.0, 1.0, 0.25), 6);
    const double first = s.grid.step;
    const auto at_first = std::count(s.locations.begin(), s.locations.end(), first);
    CHECK(at_first == 0);
    CHECK(mean(s.locations) > 0.5);
    CHECK_FALSE(s.diagnostics.warning);
  }

  TEST_CASE("determinism and worker independence") {
    const BmGrid g = default_penalized_grid(0.5, 1.0, 2.0, 0.4);
    SamplerOptions four;
    four.threads = 4;
    const auto a = penalized_limit_sample(0.5, 1.0, 2.0, 0.4, 123, g, 17, single_thread());
    const auto b = penalized_limit_sample(0.5, 1.0, 2.0, 0.4, 123, g, 17, four);
    CHECK(a.values == b.values);
    CHECK(penalized_limit_sample(0.5, 1.0, 2.0, 0.4, 5, g, 17).values !=
          penalized_limit_sample(0.5, 1.0, 2.0, 0.4, 5, g, 18).values);
  }

  TEST_CASE("parameter validation") {
    const BmGrid g{1e-3, 0, 5};
    CHECK_THROWS_AS(penalized_limit_sample(0, 1, 1, 1, 10, g, 1), std::invalid_argument);
    CHECK_THROWS_AS(penalized_limit_sample(1, 0, 1, 1, 10, g, 1), std::invalid_argument);
    CHECK_THROWS_AS(penalized_limit_sample(1, 1, 0, 1, 10, g, 1), std::invalid_argument);
    CHECK_THROWS_AS(penalized_limit_sample(1, 1, 1, 0, 10, g, 1), std::invalid_argument);
  }
}

TEST_CASE("empirical CDF conventions") {
  const EmpiricalCdf F(Vec{3, 1, 2, 2});
  CHECK(F(0.5) == 0.0);
  CHECK(F(2.0) == 0.75);
  CHECK(F(3.0) == 1.0);
  CHECK(F.quantile(0.25) == 1.0);
  CHECK(F.quantile(0.5) == 2.0);
  CHECK(F.quantile(0.51) == 2.0);
  CHECK(F.quantile(0.76) == 3.0);
  CHECK_THROWS_AS(F.quantile(1.0), std::out_of_range);
  CHECK_THROWS_AS(EmpiricalCdf(Vec{}), std::invalid_argument);
}

TEST_CASE("law dispatch") {
  CHECK(law_name(ChernoffLaw{}) == "chernoff");
  CHECK(law_name(BoundaryLaw{}) == "boundary");
  CHECK(law_name(PenalizedLaw{}) == "penalized");
  const auto s = sample_limit(BoundaryLaw{1.0, 1.0, 0.5}, 10, default_grid(BoundaryLaw{1.0, 1.0, 0.5}), 3);
  CHECK(s.values == boundary_limit_sample(1.0, 1.0, 0.5, 10, default_boundary_grid(1.0, 1.0, 0.5), 3).values);
}
