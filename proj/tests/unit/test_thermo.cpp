#include "doctest.h"

#include "bcmf/thermo.hpp"

#include <cmath>
#include <numbers>

using namespace bcmf;

namespace {
constexpr double ln2 = std::numbers::ln2;
}

TEST_CASE("linear horseshoe layout") {
  auto h = linear_horseshoe({2.0, 4.0});
  REQUIRE(h.size() == 2);
  CHECK(h.branches[0].hi - h.branches[0].lo == doctest::Approx(0.5));
  CHECK(h.branches[1].hi - h.branches[1].lo == doctest::Approx(0.25));
  CHECK(h.branches[0].hi < h.branches[1].lo);
  auto chk = verify_horseshoe(h);
  CHECK(chk.ok);
  CHECK(chk.max_endpoint_error < 1e-12);
  CHECK_THROWS_AS(linear_horseshoe({2.0}), DomainError);
  CHECK_THROWS_AS(linear_horseshoe({1.5, 1.5}), DomainError);
  CHECK_THROWS_AS(linear_horseshoe({2.0, 1.0}), DomainError);
}

TEST_CASE("linear horseshoe: Gibbs weights of sigma = 1") {
  auto h = linear_horseshoe({2.0, 4.0});
  auto cd = enumerate_cylinders(h, {Observable::identity()}, 8);
  CHECK(cd.words() == 256);
  auto st = equilibrium_stats(cd, 1.0, 0.0);
  const double p = 2.0 / 3.0, q = 1.0 / 3.0;
  CHECK(st.h == doctest::Approx(-p * std::log(p) - q * std::log(q)).epsilon(1e-9));
  CHECK(st.lambda == doctest::Approx(p * ln2 + q * std::log(4.0)).epsilon(1e-9));
  // Root of 2^-s + 4^-s = 1 is log2(golden ratio).
  auto root = pressure_root(cd);
  REQUIRE(root);
  CHECK(*root == doctest::Approx(std::log2((1 + std::sqrt(5.0)) / 2)).epsilon(1e-6));
}

TEST_CASE("measure of maximal entropy and spreading") {
  auto h = linear_horseshoe({3.0, 3.0, 3.0});
  auto cd = enumerate_cylinders(h, {Observable::constant(1.0)}, 4);
  auto st = equilibrium_stats(cd, 0.0, 0.0, 0);
  CHECK(st.h == doctest::Approx(std::log(3.0)));
  CHECK(st.lambda == doctest::Approx(std::log(3.0)));
  CHECK(st.birkhoff == doctest::Approx(1.0));
  auto m = spread_to_f_invariant(st, std::size_t{4});
  CHECK(m.h == doctest::Approx(std::log(3.0) / 4));
  CHECK(m.mean == doctest::Approx(0.25));
  CHECK(m.ratio() == doctest::Approx(1.0));
  CHECK_THROWS_AS(spread_to_f_invariant(st, std::size_t{0}), DomainError);
  CHECK_THROWS_AS(spread_to_f_invariant(st, -1.0), DomainError);
}

TEST_CASE("lap horseshoe at a = 2") {
  QuadraticMap f(2.0);
  auto h = lap_horseshoe(f, 4);
  CHECK(h.size() >= 2);
  CHECK(h.target_lo == doctest::Approx(-1.0));
  CHECK(h.target_hi == doctest::Approx(1.0));
  auto chk = verify_horseshoe(h);
  CHECK(chk.ok);
  CHECK(chk.max_endpoint_error < 1e-12);
  // The inverse lands in K_i and maps forward onto y.
  for (std::size_t i = 0; i < h.size(); ++i) {
    const long double x = h.inverse(i, 0.3L);
    CHECK(x >= h.branches[i].lo - 1e-15);
    CHECK(x <= h.branches[i].hi + 1e-15);
    CHECK(static_cast<double>(iterate_n(f, x, 4)) == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("lap horseshoe gives acip statistics at sigma = 1") {
  QuadraticMap f(2.0);
  auto h = lap_horseshoe(f, 6);
  auto cd = enumerate_cylinders(h, {Observable::identity()}, 2);
  auto m = spread_to_f_invariant(equilibrium_stats(cd, 1.0, 0.0), h.q);
  CHECK(m.lambda == doctest::Approx(ln2).epsilon(1e-3));
  CHECK(m.h == doctest::Approx(ln2).epsilon(1e-2));
  CHECK(std::abs(m.mean) < 0.1);
}

TEST_CASE("periodic orbits of the Chebyshev map") {
  QuadraticMap f(2.0);
  auto orbits = periodic_orbits(f, Observable::identity(), 3);
  // 2 fixed points, 1 orbit of period 2, 2 of period 3.
  CHECK(orbits.size() == 5);
  std::size_t fixed = 0;
  for (const auto& o : orbits) {
    CHECK(o.lambda == doctest::Approx(o.point == -1.0 ? std::log(4.0) : ln2).epsilon(1e-9));
    if (o.period == 1) {
      ++fixed;
      CHECK((o.point == doctest::Approx(-1.0) || o.point == doctest::Approx(0.5)));
    }
  }
  CHECK(fixed == 2);
  auto pm = point_mass_stats(orbits.front());
  CHECK(pm.h == 0.0);
  CHECK_THROWS_AS(periodic_orbits(f, Observable::identity(), 0), DomainError);
  CHECK_THROWS_AS(periodic_orbits(f, Observable::identity(), 31), DomainError);
}

TEST_CASE("best witness takes convex combinations") {
  MeasureStats a, b, c;
  a.h = 0;
  a.lambda = 1;
  a.mean = -1;
  b.h = 1;
  b.lambda = 1;
  b.mean = 1;
  c.h = 0.1;
  c.lambda = 1;
  c.mean = 0;
  auto w = best_witness({a, b, c}, 0.0, Score::ratio, 1e-9);
  REQUIRE(w);
  CHECK(w->mean == doctest::Approx(0.0));
  CHECK(w->h == doctest::Approx(0.5));  // the half-half mix beats c
  auto none = best_witness({a, b}, 2.0, Score::ratio, 1e-9);
  CHECK_FALSE(none);
  auto exact = best_witness({a, b}, 1.0, Score::free_energy, 1e-9);
  REQUIRE(exact);
  CHECK(exact->free_energy() == doctest::Approx(0.0));
}

TEST_CASE("refined members hit alpha") {
  auto h = linear_horseshoe({2.0, 4.0});
  auto cd = enumerate_cylinders(h, {Observable::identity()}, 6);
  const double lo = spread_to_f_invariant(equilibrium_stats(cd, 1.0, -8.0), h.q).mean;
  const double hi = spread_to_f_invariant(equilibrium_stats(cd, 1.0, 8.0), h.q).mean;
  const double alpha = 0.5 * (lo + hi);
  auto ms = refine_members(cd, {0.5, 1.0}, alpha, h.q);
  REQUIRE(!ms.empty());
  for (const auto& m : ms) CHECK(m.mean == doctest::Approx(alpha).epsilon(1e-8));
}

TEST_CASE("spectrum property check") {
  std::vector<double> a{-1, -0.5, 0, 0.5, 1};
  auto good = spectrum_property_check(a, {0, 0.6, 1, 0.6, 0}, 0.0, 1e-9, 0.7);
  CHECK(good.passed());
  auto bumpy = spectrum_property_check(a, {0, 0.6, 1, 0.7, 0.8}, 0.0, 1e-9, 0.7);
  CHECK(bumpy.monotone_violations == 1);
  CHECK_FALSE(bumpy.passed());
  auto jumpy = spectrum_property_check(a, {0, 0.6, 1, 0.6, 0}, 0.0, 1e-9, 0.5);
  CHECK(jumpy.monotone_violations == 0);
  CHECK_FALSE(jumpy.jump_ok);
}

TEST_CASE("spectrum of the doubling-like lap horseshoe peaks near 1") {
  QuadraticMap f(2.0);
  auto h = lap_horseshoe(f, 5);
  auto phi = Observable::identity();
  auto cd = enumerate_cylinders(h, {phi}, 2);
  FamilyConfig fc = FamilyConfig::defaults();
  fc.max_period = 8;
  auto fam = build_family(f, cd, phi, fc);
  SpectrumConfig sc;
  sc.refine_sigmas = {1.0};
  auto curve = birkhoff_spectrum(cd, fam, sc, {-1.0, 0.0});
  CHECK(curve.c_phi == doctest::Approx(-1.0));
  CHECK(curve.B[0] < 1e-3);
  CHECK(curve.B[1] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("cylinder measure balls and local dimension") {
  // Slopes (2, 2) fill [0, 1]: the uniform Bernoulli measure is Lebesgue.
  auto h = linear_horseshoe({2.0, 2.0});
  auto cd = enumerate_cylinders(h, {}, 12);
  auto leb = bernoulli_measure(cd, {0.5, 0.5});
  CHECK(leb.ball(0.5, 0.1) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(leb.ball(0.0, 0.1) == doctest::Approx(0.1).epsilon(1e-9));
  auto fit = local_dimension(leb, 0.37, {1e-1, 1e-2, 1e-3});
  CHECK(fit.accepted);
  CHECK(fit.dimension == doctest::Approx(1.0).epsilon(1e-3));
  auto pts = sample_points(leb, 16, 7);
  CHECK(pts.size() == 16);
  for (double x : pts) CHECK((x >= 0.0 && x <= 1.0));
  CHECK(sample_points(leb, 16, 7) == pts);
  CHECK_THROWS_AS(bernoulli_measure(cd, {0.5}), DomainError);
}
