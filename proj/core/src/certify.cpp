#include "bcmf/certify.hpp"

#include "bcmf/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace bcmf {

void CertificationConfig::validate() const {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  if (mixing_period_bound < 1) throw DomainError("mixing_period_bound must be at least 1");
  if (!(net_epsilon > 0.0 && net_epsilon < 1.0)) throw DomainError("net_epsilon must lie in (0, 1)");
}

std::string to_string(A4Status s) {
  switch (s) {
    case A4Status::pass: return "pass";
    case A4Status::fail: return "fail";
    default: return "inconclusive";
  }
}

namespace {

/// Critical orbit f^1(0), ..., f^H(0) at precision Real.
template <class Real>
std::vector<Real> critical_orbit(const QuadraticMap& map, std::size_t horizon) {
  std::vector<Real> orbit;
  orbit.reserve(horizon);
  Real x(1);
  for (std::size_t n = 1; n <= horizon; ++n) {
    orbit.push_back(x);
    x = map(x);
  }
  return orbit;
}

std::optional<std::size_t> first_exact_return(const std::vector<double>& abs_orbit, double threshold) {
  for (std::size_t i = 0; i < abs_orbit.size(); ++i)
    if (abs_orbit[i] < threshold) return i + 1;
  return std::nullopt;
}

}  // namespace

MarginResult check_a2(const QuadraticMap& map, const CertificationConfig& config) {
  map.validate();
  config.validate();
  return with_precision(map.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    const auto orbit = critical_orbit<Real>(map, config.horizon);
    std::vector<double> abs_orbit;
    abs_orbit.reserve(orbit.size());
    for (const auto& c : orbit) abs_orbit.push_back(std::abs(to_double(c)));
    MarginResult out;
    if (auto m = first_exact_return(abs_orbit, config.exact_return_threshold)) {
      out.margin = kNegInf;
      out.argmin_n = *m;
      out.exact_return = true;
      return out;
    }
    Real sum(0);
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= orbit.size(); ++n) {
      sum += map.log_abs_derivative(orbit[n - 1]);
      const double m = to_double(sum / Real(n)) - config.lambda;
      if (m < out.margin) {
        out.margin = m;
        out.argmin_n = n;
      }
    }
    return out;
  });
}

MarginResult check_a3(const QuadraticMap& map, const CertificationConfig& config) {
  map.validate();
  config.validate();
  return with_precision(map.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    const auto orbit = critical_orbit<Real>(map, config.horizon);
    MarginResult out;
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= orbit.size(); ++n) {
      const Real c = rabs(orbit[n - 1]);
      if (to_double(c) < config.exact_return_threshold) {
        out.margin = kNegInf;
        out.argmin_n = n;
        out.exact_return = true;
        return out;
      }
      const double m = to_double(rlog(c)) + config.recurrence_constant * std::sqrt(static_cast<double>(n));
      if (m < out.margin) {
        out.margin = m;
        out.argmin_n = n;
      }
    }
    return out;
  });
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  double root = 0.0;
};

NewtonOutcome newton_periodic(const QuadraticMap& map, double x, std::size_t period) {
  for (int it = 0; it < 80; ++it) {
    double y = x, d = 1.0;
    for (std::size_t i = 0; i < period; ++i) {
      d *= map.derivative(y);
      y = map(y);
    }
    const double g = y - x, dg = d - 1.0;
    if (dg == 0.0 || !std::isfinite(dg)) return {};
    double step = g / dg;
    step = std::clamp(step, -0.25, 0.25);
    x = std::clamp(x - step, -1.0, 1.0);
    if (std::abs(step) < 1e-14) {
      double z = x;
      for (std::size_t i = 0; i < period; ++i) z = map(z);
      return {std::abs(z - x) < 1e-9, x};
    }
  }
  return {};
}

PeriodicCycle make_cycle(const QuadraticMap& map, double x, std::size_t period) {
  // Reduce to the minimal period.
  std::size_t minimal = period;
  for (std::size_t d = 1; d < period; ++d) {
    if (period % d) continue;
    double z = x;
    for (std::size_t i = 0; i < d; ++i) z = map(z);
    if (std::abs(z - x) < 1e-9) {
      minimal = d;
      break;
    }
  }
  PeriodicCycle c;
  c.period = minimal;
  c.multiplier = 1.0;
  double z = x;
  for (std::size_t i = 0; i < minimal; ++i) {
    c.points.push_back(z);
    c.multiplier *= map.derivative(z);
    z = map(z);
  }
  return c;
}

}  // namespace

A4Result check_a4_heuristic(const QuadraticMap& map, const CertificationConfig& config) {
  map.validate();
  config.validate();
  A4Result out;
  std::vector<std::size_t> converged_per_period(config.mixing_period_bound + 1, 0);

  // Critical-orbit attractor test: an attracting cycle of an S-unimodal map
  // attracts the critical point.
  {
    double x = 0.0;
    for (int i = 0; i < 100000; ++i) x = map(x);
    for (std::size_t p = 1; p <= config.mixing_period_bound && !out.witness; ++p) {
      double z = x;
      for (std::size_t i = 0; i < p; ++i) z = map(z);
      if (std::abs(z - x) > 1e-8) continue;
      auto refined = newton_periodic(map, x, p);
      auto cycle = make_cycle(map, refined.converged ? refined.root : x, p);
      if (std::abs(cycle.multiplier) < 1.0) out.witness = cycle;
    }
  }

  // Seeded Newton search for periodic points of every period up to the bound.
  for (std::size_t p = 1; p <= config.mixing_period_bound && !out.witness; ++p) {
    const std::size_t seeds = 8u << std::min<std::size_t>(p, 9);
    for (std::size_t s = 0; s < seeds && !out.witness; ++s) {
      const double x0 = -1.0 + 2.0 * (static_cast<double>(s) + 0.5) / static_cast<double>(seeds);
      auto res = newton_periodic(map, x0, p);
      if (!res.converged) {
        ++out.newton_failures;
        continue;
      }
      ++converged_per_period[p];
      auto cycle = make_cycle(map, res.root, p);
      if (std::abs(cycle.multiplier) < 1.0) out.witness = cycle;
    }
  }

  // Density of a generic orbit in the dynamical core [f^2 0, f 0].
  {
    const double lo = 1.0 - map.a, hi = 1.0;
    const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / config.net_epsilon));
    std::vector<char> seen(cells, 0);
    double x = 0.1180339887498949;  // golden-ratio offset start
    for (int i = 0; i < 1000; ++i) x = map(x);
    for (std::size_t i = 0; i < config.net_orbit_length; ++i) {
      if (x >= lo && x <= hi) {
        auto c = static_cast<std::size_t>((x - lo) / config.net_epsilon);
        seen[std::min(c, cells - 1)] = 1;
      }
      x = map(x);
    }
    out.net_coverage = static_cast<double>(std::count(seen.begin(), seen.end(), 1)) / static_cast<double>(cells);
  }

  if (out.witness) {
    out.status = A4Status::fail;
    out.detail = "attracting cycle of period " + std::to_string(out.witness->period);
  } else if (out.net_coverage < 1.0) {
    out.status = A4Status::fail;
    out.detail = "generic orbit misses part of the core";
  } else if (std::any_of(converged_per_period.begin() + 1, converged_per_period.end(),
                         [](std::size_t c) { return c == 0; })) {
    out.status = A4Status::inconclusive;
    out.detail = "Newton found no periodic point for some period";
  } else {
    out.status = A4Status::pass;
    out.detail = "no attracting cycle up to the period bound; generic orbit is dense at the net scale";
  }
  return out;
}

ConditionReport certify(const QuadraticMap& map, const CertificationConfig& config) {
  ConditionReport r;
  r.a = map.a;
  r.horizon = config.horizon;
  r.a2 = check_a2(map, config);
  r.a3 = check_a3(map, config);
  r.a4 = check_a4_heuristic(map, config);
  r.passed = r.a2.margin >= 0.0 && r.a3.margin >= 0.0 && r.a4.status == A4Status::pass;
  r.note = "growth and recurrence conditions not falsified up to n = " + std::to_string(config.horizon) +
           " (finite horizon, not a proof); mixing checked heuristically; growth plus slow recurrence "
           "imply topological mixing on the core (Young 1992)";
  return r;
}

ScanSummary scan_parameters(double a_lo, double a_hi, std::size_t grid, const CertificationConfig& config,
                            int precision_bits, unsigned workers) {
  if (grid < 1) throw DomainError("grid must be at least 1");
  if (a_hi < a_lo) throw DomainError("scan interval must satisfy a_lo <= a_hi");
  ScanSummary out;
  out.reports.resize(grid);
  parallel_for(grid, workers, [&](std::size_t i) {
    const double a = grid == 1 ? a_lo : a_lo + (a_hi - a_lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    out.reports[i] = certify(QuadraticMap(a, precision_bits), config);
  });
  for (const auto& r : out.reports) out.passes += r.passed ? 1 : 0;
  return out;
}

}  // namespace bcmf
