#include "doctest.h"

#include "bcmf/quadratic_map.hpp"
#include "bcmf/rng.hpp"

#include <cmath>
#include <numbers>

using namespace bcmf;
using doctest::Approx;

TEST_CASE("iterate: closed-form orbits") {
  QuadraticMap f(2.0);
  auto seg = iterate(f, 0.0, 3);
  REQUIRE(seg.points.size() == 4);
  CHECK(seg.points[0] == 0.0);
  CHECK(seg.points[1] == 1.0);
  CHECK(seg.points[2] == -1.0);
  CHECK(seg.points[3] == -1.0);
  CHECK(seg.log_deriv_prefix[1] == -std::numeric_limits<double>::infinity());

  auto fixed = iterate(f, 0.5, 2);
  CHECK(fixed.points[2] == 0.5);

  auto g = iterate(QuadraticMap(1.9), 0.3, 1);
  CHECK(g.points[1] == Approx(0.829).epsilon(1e-15));
}

TEST_CASE("iterate: domain errors") {
  CHECK_THROWS_AS(iterate(QuadraticMap(2.0), 1.5, 3), DomainError);
  CHECK_THROWS_AS(QuadraticMap(2.5), DomainError);
  CHECK_THROWS_AS(QuadraticMap(0.0), DomainError);
  CHECK_THROWS(QuadraticMap(2.0, 40));
}

TEST_CASE("log-derivative prefix") {
  QuadraticMap f(1.8);
  auto seg = iterate(f, 0.2, 5);
  double acc = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(seg.log_deriv_prefix[i] == Approx(acc).epsilon(1e-14));
    acc += std::log(2 * 1.8 * std::abs(seg.points[i]));
  }
}

TEST_CASE("lyapunov_average at fixed points and the critical point") {
  QuadraticMap f(2.0);
  CHECK(lyapunov_average(f, -1.0, 10) == Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(lyapunov_average(f, 0.5, 10) == Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(lyapunov_average(f, 0.0, 10) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(lyapunov_average(f, 0.1, 0), DomainError);
}

TEST_CASE("lyapunov Monte Carlo is close to log 2 at a = 2") {
  auto mc = lyapunov_monte_carlo(QuadraticMap(2.0), 100000, 8, 7);
  CHECK(std::abs(mc.mean - std::numbers::ln2) < 2e-2);
  auto again = lyapunov_monte_carlo(QuadraticMap(2.0), 100000, 8, 7, 3);
  CHECK(mc.mean == again.mean);  // worker count does not change results
}

TEST_CASE("birkhoff_average") {
  QuadraticMap f(2.0);
  CHECK(birkhoff_average(f, 0.5, 17, Observable::identity()) == 0.5);
  const double x2 = (1.0 + std::sqrt(5.0)) / 4.0;
  CHECK(birkhoff_average(f, x2, 20, Observable::identity()) == Approx(0.25).epsilon(1e-12));
  // (0 + 1 - 998) / 1000
  CHECK(birkhoff_average(f, 0.0, 1000, Observable::identity()) == Approx(-0.997).epsilon(1e-12));
}

TEST_CASE("fixed points") {
  auto fp2 = fixed_points(QuadraticMap(2.0));
  CHECK(fp2.x_hat == Approx(0.5));
  REQUIRE(fp2.points.size() == 2);
  CHECK(fp2.points[0].point == Approx(-1.0));
  CHECK(std::abs(fp2.points[0].multiplier) == Approx(4.0));
  CHECK(std::abs(fp2.points[1].multiplier) == Approx(2.0));
  CHECK(fixed_points(QuadraticMap(1.0)).x_hat == Approx(0.6180339887498949));
  auto fp05 = fixed_points(QuadraticMap(0.5));
  CHECK(fp05.x_hat == Approx(std::sqrt(3.0) - 1.0));
  CHECK(fp05.points.size() == 1);
  CHECK(to_double(orientation_reversing_fixed_point<Real128>(1.0)) == Approx(0.6180339887498949));
}

TEST_CASE("precision consistency and determinism") {
  QuadraticMap lo(2.0, 53), hi(2.0, 128);
  auto a = iterate(lo, 0.375, 40);
  auto b = iterate(hi, 0.375, 40);
  // Identical while the dyadic orbit is exact in double, then the rounding
  // error grows at most like 2^n.
  for (std::size_t i = 0; i <= 4; ++i) CHECK(a.points[i] == b.points[i]);
  for (std::size_t i = 0; i <= 40; ++i)
    CHECK(std::abs(a.points[i] - b.points[i]) <= std::ldexp(std::numeric_limits<double>::epsilon(), int(i) + 2));
  auto c = iterate(QuadraticMap(1.93, 113), 0.123, 200);
  auto d = iterate(QuadraticMap(1.93, 113), 0.123, 200);
  CHECK(c.points == d.points);
}

// x = -cos(pi u) conjugates f to the tent map on [0, 1].
TEST_CASE("Chebyshev conjugacy") {
  QuadraticMap f(2.0);
  Rng rng(derive_seed(11, 0));
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform(rng, 0.0, 1.0);
    const double lhs = f(-std::cos(std::numbers::pi * u));
    const double tent = u < 0.5 ? 2.0 * u : 2.0 - 2.0 * u;
    const double rhs = -std::cos(std::numbers::pi * tent);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("even symmetry") {
  QuadraticMap f(1.97);
  auto p = iterate(f, 0.31, 30), m = iterate(f, -0.31, 30);
  for (std::size_t i = 1; i <= 30; ++i) CHECK(p.points[i] == m.points[i]);
}

TEST_CASE("inverse branches") {
  const double a = 1.95;
  QuadraticMap f(a);
  Itinerary signs = {1, -1, -1, 1};
  const Real113 y(0.3);
  auto chain = pull_back_orbit<Real113>(a, y, signs);
  for (std::size_t i = 0; i < signs.size(); ++i) {
    CHECK((chain[i] >= 0 ? 1 : -1) == signs[i]);
    CHECK(to_double(f(chain[i]) - chain[i + 1]) == Approx(0.0).epsilon(1e-30));
  }
  CHECK(to_double(pull_back<Real113>(a, y, signs)) == to_double(chain[0]));
}

TEST_CASE("observables") {
  CHECK(Observable::from_spec("x", 2.0)(0.25) == 0.25);
  CHECK(Observable::from_spec("x2", 2.0)(0.5) == 0.25);
  CHECK(Observable::from_spec("cospix", 2.0)(1.0) == Approx(-1.0));
  auto p = Observable::from_spec("poly:1,0,-2", 2.0);
  CHECK(p(0.5) == Approx(0.5));
  CHECK(*p.lipschitz_bound == Approx(4.0));
  CHECK(Observable::from_spec("logdf", 2.0)(0.0) == Approx(std::log(4e-6)));
  CHECK_THROWS(Observable::from_spec("sinx", 2.0));
  CHECK_THROWS(Observable::from_spec("poly:1,a", 2.0));
}
