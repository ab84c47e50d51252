#include "doctest.h"

#include "bcmf/ldp.hpp"

#include <cmath>
#include <numbers>

using namespace bcmf;

namespace {
constexpr double ln2 = std::numbers::ln2;

struct Family {
  QuadraticMap map{2.0};
  Observable phi = Observable::identity();
  CylinderData cd;
  MeasureFamily fam;
  Family() {
    cd = enumerate_cylinders(lap_horseshoe(map, 5), {phi}, 2);
    auto fc = FamilyConfig::defaults();
    fc.max_period = 10;
    fam = build_family(map, cd, phi, fc);
  }
};

const Family& family() {
  static const Family f;
  return f;
}
}  // namespace

TEST_CASE("richardson removes a 1/n term") {
  auto r = [](double n) { return 0.3 + 1.7 / n; };
  CHECK(richardson(r(10), 10, r(20), 20) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(richardson(1, 5, 2, 5), DomainError);
}

TEST_CASE("quadrature free energy: constant and n = 1 closed forms") {
  QuadraticMap f(2.0);
  for (std::size_t n : {1u, 5u, 12u}) {
    auto z = free_energy_quadrature(f, Observable::constant(0.0), n, 7);
    CHECK(z.value == doctest::Approx(ln2 / static_cast<double>(n)).epsilon(1e-12));
    CHECK(std::abs(z.corrected()) < 1e-12);
    CHECK(z.laps == (std::size_t{1} << n));
  }
  // (1/1) log int_{-1}^{1} e^x dx = log(2 sinh 1).
  auto e = free_energy_quadrature(f, Observable::identity(), 1, 10);
  CHECK(e.value == doctest::Approx(std::log(2.0 * std::sinh(1.0))).epsilon(1e-12));
  CHECK_THROWS_AS(free_energy_quadrature(f, Observable::identity(), 23), DomainError);
  CHECK_THROWS_AS(free_energy_quadrature(f, Observable::identity(), 4, 8), DomainError);
}

TEST_CASE("quadrature and Monte Carlo agree") {
  QuadraticMap f(2.0);
  auto q = free_energy_quadrature(f, Observable::square(), 8, 7);
  auto mc = free_energy_monte_carlo(f, Observable::square(), 8, 200000, 3);
  CHECK(std::abs(q.value - mc.value) < 4 * mc.std_error + 1e-3);
  CHECK(q.value == doctest::Approx(free_energy_quadrature(f, Observable::square(), 8, 20).value).epsilon(1e-7));
}

TEST_CASE("plain deviation probability") {
  QuadraticMap f(2.0);
  auto all = deviation_probability(f, Observable::identity(), -1.0, 1.0, 10, 4000, 1);
  CHECK(all.hits == 4000);
  CHECK(all.measure == doctest::Approx(2.0));
  CHECK(all.log_measure_rate == doctest::Approx(ln2 / 10));
  auto none = deviation_probability(f, Observable::identity(), 2.0, 3.0, 10, 4000, 1);
  CHECK(none.hits == 0);
  CHECK(none.needs_tilting);
  CHECK(none.log_measure_rate == kNegInf);
  CHECK_THROWS_AS(deviation_probability(f, Observable::identity(), 0.0, 1.0, 10, 999, 1), DomainError);
  CHECK_THROWS_AS(deviation_probability(f, Observable::identity(), 1.0, 0.0, 10, 4000, 1), DomainError);
}

TEST_CASE("Monte Carlo is deterministic in seed and independent of workers") {
  QuadraticMap f(2.0);
  auto a = deviation_probability(f, Observable::identity(), 0.1, 0.5, 12, 10000, 5, 1);
  auto b = deviation_probability(f, Observable::identity(), 0.1, 0.5, 12, 10000, 5, 3);
  CHECK(a.hits == b.hits);
  CHECK(a.measure == b.measure);
  auto c = deviation_probability(f, Observable::identity(), 0.1, 0.5, 12, 10000, 6, 1);
  CHECK(a.measure != c.measure);
  auto t1 = deviation_probability_tilted(f, Observable::identity(), 0.3, 0.5, 16, 8000, 5, std::nullopt, 8, 1);
  auto t2 = deviation_probability_tilted(f, Observable::identity(), 0.3, 0.5, 16, 8000, 5, std::nullopt, 8, 2);
  CHECK(t1.measure == t2.measure);
  CHECK(t1.tilt == t2.tilt);
}

TEST_CASE("zero tilt reproduces the plain estimate") {
  QuadraticMap f(2.0);
  auto plain = deviation_probability(f, Observable::identity(), 0.0, 0.4, 10, 100000, 11);
  auto tilted = deviation_probability_tilted(f, Observable::identity(), 0.0, 0.4, 10, 100000, 11, 0.0, 6);
  CHECK(tilted.method == "importance");
  CHECK(std::abs(plain.measure - tilted.measure) < 4 * (plain.measure * 0.02 + 1e-3));
  CHECK_THROWS_AS(deviation_probability_tilted(f, Observable::identity(), 0.0, 0.4, 10, 4000, 1, 0.0, 11),
                  DomainError);
}

TEST_CASE("importance sampling reaches rare windows") {
  QuadraticMap f(2.0);
  auto is = deviation_probability_tilted(f, Observable::identity(), 0.3, 0.5, 24, 20000, 2);
  CHECK(is.hits > 1000);
  CHECK(is.tilt > 0);
  CHECK(is.log_measure_rate < 0);
  CHECK(is.log_measure_rate > -0.3);
}

TEST_CASE("covering estimate counts laps") {
  QuadraticMap f(2.0);
  auto all = covering_estimate(f, Observable::identity(), -1.0, 1.0, 8);
  CHECK(all.cylinders == 256);
  CHECK(all.selected == 256);
  CHECK(all.total_length == doctest::Approx(2.0));
  auto part = covering_estimate(f, Observable::identity(), 0.3, 0.5, 12);
  CHECK(part.selected < part.cylinders);
  CHECK(part.rate < 0);
}

TEST_CASE("rate function on the family") {
  const auto& F = family();
  auto rc = rate_function(F.cd, F.fam, {-1.0, 0.0, 0.25});
  CHECK(rc.F[0] == doctest::Approx(-std::log(4.0)).epsilon(1e-4));
  CHECK(std::abs(rc.F[1]) < 0.02);
  CHECK(rc.F[2] < rc.F[1]);
  for (double v : rc.F) CHECK(v <= 1e-2);
  auto off = rate_function(F.cd, F.fam, {3.0});
  CHECK(off.F[0] == kNegInf);
  CHECK_FALSE(off.witness[0]);
  const double lmax = family_legendre_max(F.fam);
  for (const auto& m : F.fam.members) CHECK(lmax >= m.mean + m.free_energy() - 1e-12);
}

TEST_CASE("legendre check input validation") {
  const auto& F = family();
  CHECK_THROWS_AS(legendre_check(F.map, {F.phi, Observable::square()}, {F.fam}, 10), DomainError);
  auto rep = legendre_check(F.map, {F.phi}, {F.fam}, 10, 0.05, 7);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].correction == doctest::Approx(ln2 / 10));
  CHECK(rep.rows[0].delta_corrected == doctest::Approx(std::abs(rep.rows[0].P_n - ln2 / 10 - rep.rows[0].family_max)));
}
