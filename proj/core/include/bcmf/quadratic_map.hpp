#pragma once

// The quadratic family f_a(x) = 1 - a x^2 on X = [-1, 1]: orbits, derivative
// cocycles, Birkhoff sums and inverse branches.

#include "bcmf/real.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcmf {

/// Raised for arguments outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct QuadraticMap {
  double a = 2.0;
  int precision_bits = 53;

  QuadraticMap() = default;
  QuadraticMap(double a_, int bits = 53) : a(a_), precision_bits(bits) { validate(); }

  void validate() const {
    if (!(a > 0.0 && a <= 2.0))
      throw DomainError("parameter a must lie in (0, 2], got " + std::to_string(a));
    round_up_precision(precision_bits);
  }

  template <class Real>
  Real operator()(const Real& x) const {
    return Real(1) - Real(a) * x * x;
  }
  /// Df(x) = -2 a x.
  template <class Real>
  Real derivative(const Real& x) const {
    return Real(-2) * Real(a) * x;
  }
  /// log |Df(x)| with log 0 = -infinity.
  template <class Real>
  Real log_abs_derivative(const Real& x) const {
    if (x == 0) return -std::numeric_limits<Real>::infinity();
    return rlog(Real(2) * Real(a) * rabs(x));
  }
};

/// Orbit x0, f(x0), ..., f^n(x0) with running sums of log|Df|.
template <class Real>
struct BasicOrbitSegment {
  Real start{};
  std::vector<Real> points;            // n + 1 entries
  std::vector<Real> log_deriv_prefix;  // entry i = sum_{j<i} log|Df(points[j])|

  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};
using OrbitSegment = BasicOrbitSegment<double>;

/// Real-valued observable on [-1, 1].
struct Observable {
  std::string name;
  std::function<double(double)> evaluator;
  std::optional<double> lipschitz_bound;

  double operator()(double x) const { return evaluator(x); }

  static Observable identity();
  static Observable square();
  static Observable cos_pi();
  static Observable constant(double c);
  /// sum_k coeffs[k] x^k.
  static Observable polynomial(std::vector<double> coeffs);
  /// Bounded proxy for log|Df|: log(2a max(|x|, floor)).
  static Observable log_derivative_proxy(double a, double floor = 1e-6);
  /// Named builtin: x | x2 | cospix | zero | logdf | poly:c0,c1,...
  static Observable from_spec(const std::string& spec, double a);
};

namespace detail {
inline void check_start(const QuadraticMap& map, double x0) {
  map.validate();
  if (!(x0 >= -1.0 && x0 <= 1.0))
    throw DomainError("initial point must lie in [-1, 1], got " + std::to_string(x0));
}
}  // namespace detail

template <class Real>
BasicOrbitSegment<Real> iterate(const QuadraticMap& map, const Real& x0, std::size_t n) {
  detail::check_start(map, to_double(x0));
  BasicOrbitSegment<Real> seg;
  seg.start = x0;
  seg.points.reserve(n + 1);
  seg.log_deriv_prefix.reserve(n + 1);
  seg.points.push_back(x0);
  seg.log_deriv_prefix.push_back(Real(0));
  Real x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    seg.log_deriv_prefix.push_back(seg.log_deriv_prefix.back() + map.log_abs_derivative(x));
    x = map(x);
    seg.points.push_back(x);
  }
  return seg;
}

/// Orbit at the map's working precision, rounded to double for reporting.
OrbitSegment iterate(const QuadraticMap& map, double x0, std::size_t n);

/// (1/n) sum_{i<n} log|Df(f^i x0)|; -infinity when the orbit hits 0 exactly.
double lyapunov_average(const QuadraticMap& map, double x0, std::size_t n);

/// (1/n) sum_{i<n} phi(f^i x0).
double birkhoff_average(const QuadraticMap& map, double x0, std::size_t n, const Observable& phi);

struct MonteCarloMean {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Lyapunov exponent of Lebesgue-random starting points: one orbit of length
/// n per seed, x0 uniform on [-1, 1], native doubles.
MonteCarloMean lyapunov_monte_carlo(const QuadraticMap& map, std::size_t n, std::size_t seeds,
                                    std::uint64_t root_seed, unsigned workers = 1);

/// Birkhoff average of phi over Lebesgue-random starting points (one orbit
/// of length n per seed, native doubles); estimates the acip mean of phi.
MonteCarloMean birkhoff_monte_carlo(const QuadraticMap& map, const Observable& phi, std::size_t n,
                                    std::size_t seeds, std::uint64_t root_seed, unsigned workers = 1);

struct FixedPoint {
  double point;
  double multiplier;  // Df at the point
};

struct FixedPoints {
  std::vector<FixedPoint> points;  // roots of a x^2 + x - 1 = 0 inside [-1, 1]
  double x_hat;                    // orientation-reversing fixed point
};

FixedPoints fixed_points(const QuadraticMap& map);

/// x-hat = (-1 + sqrt(1 + 4a)) / (2a) at precision Real.
template <class Real>
Real orientation_reversing_fixed_point(double a) {
  Real ra(a);
  return (rsqrt(Real(1) + Real(4) * ra) - Real(1)) / (Real(2) * ra);
}

/// Sign of each image along an orbit piece; +1 right of 0, -1 left.
using Itinerary = std::vector<std::int8_t>;

/// Inverse branch of f with the given sign: s * sqrt((1 - y) / a).
template <class Real>
Real inverse_branch(double a, const Real& y, int sign) {
  Real t = (Real(1) - y) / Real(a);
  if (t < 0) t = 0;
  Real r = rsqrt(t);
  return sign < 0 ? Real(-r) : r;
}

/// x with f^k(x) = y following `signs` (signs[i] = sign of f^i x).
template <class Real>
Real pull_back(double a, Real y, std::span<const std::int8_t> signs) {
  for (std::size_t i = signs.size(); i-- > 0;) y = inverse_branch(a, y, signs[i]);
  return y;
}

/// Backward chain: out[i] = f^i(x) for i = 0..k where f^k(x) = y.
template <class Real>
std::vector<Real> pull_back_orbit(double a, const Real& y, std::span<const std::int8_t> signs) {
  std::vector<Real> out(signs.size() + 1);
  out.back() = y;
  for (std::size_t i = signs.size(); i-- > 0;) out[i] = inverse_branch(a, out[i + 1], signs[i]);
  return out;
}

/// log|Df^n(x)| at precision Real (-infinity if the orbit hits 0).
template <class Real>
Real log_abs_derivative_n(const QuadraticMap& map, Real x, std::size_t n) {
  Real acc(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (x == 0) return -std::numeric_limits<Real>::infinity();
    acc += map.log_abs_derivative(x);
    x = map(x);
  }
  return acc;
}

template <class Real>
Real iterate_n(const QuadraticMap& map, Real x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x = map(x);
  return x;
}

}  // namespace bcmf
