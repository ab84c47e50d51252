#include "doctest.h"

#include "bcmf/inducing.hpp"

#include <cmath>
#include <numbers>

using namespace bcmf;

namespace {

struct A2 {
  QuadraticMap map{2.0};
  CriticalPartition part;
  InducedSystem sys;
  A2() : part(build_critical_partition(QuadraticMap(2.0, 128), BindingConfig{})) {
    InducingConfig cfg;
    cfg.T_max = 40;
    cfg.min_mass = 1e-3;
    cfg.snapshot_times = {10, 20};
    sys = build_induced_map(map, part, cfg);
  }
};

const A2& a2() {
  static const A2 s;
  return s;
}

}  // namespace

TEST_CASE("tail fit recovers a geometric tail") {
  std::vector<double> tail;
  for (int n = 0; n <= 40; ++n) tail.push_back(std::pow(0.5, n));
  auto fit = return_time_tail(tail);
  CHECK(fit.accepted);
  CHECK(fit.zeta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.C1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("tail fit with 1% multiplicative noise") {
  std::vector<double> tail;
  for (int n = 0; n <= 40; ++n) tail.push_back(std::pow(0.8, n) * (1.0 + 0.01 * ((n % 3) - 1)));
  auto fit = return_time_tail(tail);
  CHECK(fit.accepted);
  CHECK(std::abs(fit.zeta - 0.8) < 0.01);
}

TEST_CASE("tail fit skips the initial plateau and rejects flat tails") {
  std::vector<double> tail(5, 1.0);
  for (int n = 1; n <= 20; ++n) tail.push_back(std::pow(0.9, n));
  auto fit = return_time_tail(tail);
  CHECK(fit.first_n >= 4);
  CHECK(fit.zeta == doctest::Approx(0.9).epsilon(1e-9));
  CHECK_FALSE(return_time_tail(std::vector<double>(30, 1.0)).accepted);
  CHECK_FALSE(return_time_tail(std::vector<double>{1.0, 0.5}).accepted);
}

TEST_CASE("koebe bound") {
  CHECK(koebe_bound(1.0) == 4.0);
  CHECK(koebe_bound(0.5) == doctest::Approx(9.0));
}

TEST_CASE("config validation") {
  InducingConfig c;
  c.min_mass = -1;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = InducingConfig{};
  c.max_steps = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = InducingConfig{};
  c.T_max = 2;
  CHECK_THROWS_AS(build_induced_map(QuadraticMap(2.0), a2().part, c), DomainError);
}

TEST_CASE("induced map at a = 2: mass balance and ordering") {
  const auto& s = a2().sys;
  REQUIRE(!s.branches.empty());
  CHECK(s.lambda_measure == doctest::Approx(2.0 * (s.lambda_hi - s.lambda_lo)));
  double returned = 0;
  for (const auto& b : s.branches) {
    returned += b.length;
    CHECK(b.R >= 1);
    CHECK(b.R <= s.T_max);
    CHECK(b.itinerary.size() == b.R);
    CHECK(b.xi > 0);
  }
  CHECK(returned / s.lambda_measure == doctest::Approx(s.coverage()).epsilon(1e-9));
  CHECK(s.coverage() + (s.deep_loss + s.pruned + s.unreturned) / s.lambda_measure == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 0; i + 1 < s.branches.size(); ++i) CHECK(s.branches[i].hi <= s.branches[i + 1].lo);
  for (std::size_t n = 1; n < s.tail.size(); ++n) CHECK(s.tail[n] <= s.tail[n - 1]);
  CHECK(s.tail.front() == doctest::Approx(s.lambda_measure));
}

TEST_CASE("branches come in mirror pairs") {
  const auto& s = a2().sys;
  std::size_t neg = 0;
  for (const auto& b : s.branches) neg += b.domain_sign < 0;
  CHECK(2 * neg == s.branches.size());
  const auto& b = s.branches.back();
  auto m = s.branch_of(-0.5 * (b.lo + b.hi));
  REQUIRE(m.has_value());
  CHECK(s.branches[*m].R == b.R);
  CHECK(s.branches[*m].target_sign == b.target_sign);  // f is even
  CHECK(s.branches[*m].itinerary[0] == -b.itinerary[0]);
}

TEST_CASE("markov property") {
  auto rep = markov_check(a2().sys);
  CHECK(rep.branches == a2().sys.branches.size());
  CHECK(rep.sign_violations == 0);
  CHECK(rep.max_relative_error < 1e-9);
}

TEST_CASE("tower step climbs then returns") {
  const auto& s = a2().sys;
  const auto& b = s.branches.back();
  TowerPoint p{0.5 * (b.lo + b.hi), 0};
  for (std::size_t l = 1; l < b.R; ++l) {
    p = tower_step(a2().map, s, p);
    CHECK(p.level == l);
  }
  p = tower_step(a2().map, s, p);
  CHECK(p.level == 0);
  const double tlo = b.target_sign > 0 ? s.lambda_lo : -s.lambda_hi;
  const double thi = b.target_sign > 0 ? s.lambda_hi : -s.lambda_lo;
  CHECK(p.x >= tlo);
  CHECK(p.x <= thi);
  CHECK_THROWS_AS(tower_step(a2().map, s, {b.lo, b.R}), DomainError);
  CHECK_THROWS_AS(tower_step(a2().map, s, {0.9, 0}), DomainError);
}

TEST_CASE("distortion within the koebe bound") {
  InducedSystem s = a2().sys;
  auto rep = distortion_check(s, 5);
  CHECK(rep.branches == s.branches.size());
  CHECK(rep.max_ratio >= 1.0);
  CHECK(rep.koebe_violations == 0);
  CHECK_THROWS_AS(distortion_check(s, 1), DomainError);
}

TEST_CASE("quick return rows") {
  auto rep = quick_return_check(a2().sys, 0.9 * std::numbers::ln2);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].k == 10);
  CHECK(rep.rows[0].elements == a2().sys.snapshots[0].lengths.size());
  CHECK(rep.rows[0].window_hi > 10.0);
}
