#include "bcmf/quadratic_map.hpp"

#include "bcmf/parallel.hpp"
#include "bcmf/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bcmf {

Observable Observable::identity() {
  return {"x", [](double x) { return x; }, 1.0};
}

Observable Observable::square() {
  return {"x2", [](double x) { return x * x; }, 2.0};
}

Observable Observable::cos_pi() {
  return {"cospix", [](double x) { return std::cos(std::numbers::pi * x); }, std::numbers::pi};
}

Observable Observable::constant(double c) {
  std::ostringstream name;
  name.precision(17);
  name << "const:" << c;
  return {name.str(), [c](double) { return c; }, 0.0};
}

Observable Observable::polynomial(std::vector<double> coeffs) {
  std::ostringstream name;
  name.precision(17);
  name << "poly:";
  double lip = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (k) name << ',';
    name << coeffs[k];
    lip += static_cast<double>(k) * std::abs(coeffs[k]);  // sup |p'| on [-1, 1]
  }
  auto eval = [c = std::move(coeffs)](double x) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
  };
  return {name.str(), std::move(eval), lip};
}

Observable Observable::log_derivative_proxy(double a, double floor) {
  return {"logdf", [a, floor](double x) { return std::log(2.0 * a * std::max(std::abs(x), floor)); },
          1.0 / floor};
}

Observable Observable::from_spec(const std::string& spec, double a) {
  if (spec == "x") return identity();
  if (spec == "x2") return square();
  if (spec == "cospix") return cos_pi();
  if (spec == "zero") return constant(0.0);
  if (spec == "logdf") return log_derivative_proxy(a);
  if (spec.rfind("poly:", 0) == 0) {
    std::vector<double> coeffs;
    std::stringstream in(spec.substr(5));
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        coeffs.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad polynomial coefficient '" + tok + "'");
      }
    }
    if (coeffs.empty()) throw std::invalid_argument("polynomial observable needs coefficients");
    return polynomial(std::move(coeffs));
  }
  throw std::invalid_argument("unknown observable '" + spec + "'");
}

OrbitSegment iterate(const QuadraticMap& map, double x0, std::size_t n) {
  return with_precision(map.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    auto seg = iterate<Real>(map, Real(x0), n);
    OrbitSegment out;
    out.start = x0;
    out.points.reserve(seg.points.size());
    out.log_deriv_prefix.reserve(seg.points.size());
    for (const auto& p : seg.points) out.points.push_back(to_double(p));
    for (const auto& l : seg.log_deriv_prefix) out.log_deriv_prefix.push_back(to_double(l));
    return out;
  });
}

double lyapunov_average(const QuadraticMap& map, double x0, std::size_t n) {
  if (n == 0) throw DomainError("lyapunov_average needs n >= 1");
  detail::check_start(map, x0);
  return with_precision(map.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    Real s = log_abs_derivative_n(map, Real(x0), n);
    return to_double(s) / static_cast<double>(n);
  });
}

double birkhoff_average(const QuadraticMap& map, double x0, std::size_t n, const Observable& phi) {
  if (n == 0) throw DomainError("birkhoff_average needs n >= 1");
  detail::check_start(map, x0);
  return with_precision(map.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    Real x(x0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += phi(to_double(x));
      x = map(x);
    }
    return acc / static_cast<double>(n);
  });
}

MonteCarloMean lyapunov_monte_carlo(const QuadraticMap& map, std::size_t n, std::size_t seeds,
                                    std::uint64_t root_seed, unsigned workers) {
  map.validate();
  if (n == 0 || seeds == 0) throw DomainError("lyapunov_monte_carlo needs n >= 1 and seeds >= 1");
  const double two_a = 2.0 * map.a;
  std::vector<double> values(seeds);
  parallel_for(seeds, workers, [&](std::size_t s) {
    Rng rng(derive_seed(root_seed, s));
    double x = uniform(rng, -1.0, 1.0);
    // Multiply |Df| factors and renormalise the mantissa every 16 steps.
    double prod = 1.0;
    long exponent = 0;
    for (std::size_t i = 0; i < n; ++i) {
      prod *= two_a * std::abs(x);
      x = 1.0 - map.a * x * x;
      if ((i & 15) == 15) {
        int e = 0;
        prod = std::frexp(prod, &e);
        exponent += e;
      }
    }
    values[s] = prod == 0.0 ? kNegInf
                            : (std::log(prod) + static_cast<double>(exponent) * std::numbers::ln2) /
                                  static_cast<double>(n);
  });
  MonteCarloMean out;
  out.samples = seeds;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(seeds);
  if (seeds > 1 && std::isfinite(out.mean)) {
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(var / static_cast<double>(seeds - 1) / static_cast<double>(seeds));
  }
  return out;
}

MonteCarloMean birkhoff_monte_carlo(const QuadraticMap& map, const Observable& phi, std::size_t n,
                                    std::size_t seeds, std::uint64_t root_seed, unsigned workers) {
  map.validate();
  if (n == 0 || seeds == 0) throw DomainError("birkhoff_monte_carlo needs n >= 1 and seeds >= 1");
  std::vector<double> values(seeds);
  parallel_for(seeds, workers, [&](std::size_t s) {
    Rng rng(derive_seed(root_seed, s));
    double x = uniform(rng, -1.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += phi(x);
      x = 1.0 - map.a * x * x;
    }
    values[s] = acc / static_cast<double>(n);
  });
  MonteCarloMean out;
  out.samples = seeds;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(seeds);
  if (seeds > 1) {
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(var / static_cast<double>(seeds - 1) / static_cast<double>(seeds));
  }
  return out;
}

FixedPoints fixed_points(const QuadraticMap& map) {
  map.validate();
  const double a = map.a;
  const double disc = std::sqrt(1.0 + 4.0 * a);
  FixedPoints out;
  out.x_hat = (-1.0 + disc) / (2.0 * a);
  const double other = (-1.0 - disc) / (2.0 * a);
  if (other >= -1.0 - 1e-15) out.points.push_back({std::max(other, -1.0), -2.0 * a * std::max(other, -1.0)});
  out.points.push_back({out.x_hat, -2.0 * a * out.x_hat});
  return out;
}

}  // namespace bcmf
