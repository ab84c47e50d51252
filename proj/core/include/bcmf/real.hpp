#pragma once

// Working-precision scalar types and runtime dispatch on mantissa bits.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bcmf {

using Real64 = long double;
using Real113 = boost::multiprecision::float128;
using Real128 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;
using Real256 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

/// Mantissa bits actually provided by a scalar type.
template <class Real>
constexpr int mantissa_bits() {
  return std::numeric_limits<Real>::digits;
}

/// Supported precision tiers, in increasing order.
inline constexpr int kPrecisionTiers[] = {53, 64, 113, 128, 256};

/// Smallest supported tier with at least `bits` mantissa bits.
inline int round_up_precision(int bits) {
  if (bits < 53) throw std::invalid_argument("precision must be at least 53 bits");
  for (int t : kPrecisionTiers)
    if (bits <= t) return t;
  throw std::invalid_argument("precision above 256 bits is not supported: " + std::to_string(bits));
}

/// Calls `fn(Real{})` with the scalar type of the tier that covers `bits`.
template <class Fn>
decltype(auto) with_precision(int bits, Fn&& fn) {
  switch (round_up_precision(bits)) {
    case 53: return fn(double{});
    case 64: return fn(Real64{});
    case 113: return fn(Real113{});
    case 128: return fn(Real128{});
    default: return fn(Real256{});
  }
}

template <class Real>
inline double to_double(const Real& x) {
  return static_cast<double>(x);
}

// Uniform math entry points: ADL picks the Boost overloads for multiprecision
// types, the std ones for builtin floating types.
template <class Real>
inline Real rsqrt(const Real& x) {
  using std::sqrt;
  return sqrt(x);
}
template <class Real>
inline Real rlog(const Real& x) {
  using std::log;
  return log(x);
}
template <class Real>
inline Real rabs(const Real& x) {
  using std::abs;
  return abs(x);
}
template <class Real>
inline Real rexp(const Real& x) {
  using std::exp;
  return exp(x);
}

}  // namespace bcmf
