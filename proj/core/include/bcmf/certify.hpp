#pragma once

// Finite-horizon checks of the growth (A2), slow-recurrence (A3) and mixing
// (A4) conditions along the critical orbit, and parameter scans.
//
// Every verdict is "not falsified up to the horizon"; the conditions quantify
// over all n and cannot be proved by a finite computation.

#include "bcmf/quadratic_map.hpp"

#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace bcmf {

struct CertificationConfig {
  double lambda = 0.9 * std::numbers::ln2;
  std::size_t horizon = 1000;
  double recurrence_constant = 0.01;
  std::size_t mixing_period_bound = 8;
  /// |f^n 0| below this counts as an exact return to the critical point.
  double exact_return_threshold = 1e-14;
  /// Cell width used for the orbit-density part of the (A4) surrogate.
  double net_epsilon = 0.01;
  std::size_t net_orbit_length = 20000;

  void validate() const;
};

struct MarginResult {
  double margin = 0.0;       // -infinity on exact return
  std::size_t argmin_n = 0;  // n attaining the minimum
  bool exact_return = false;
};

/// min_{1<=n<=H} (1/n) log|Df^n(f0)| - lambda along the critical value orbit.
MarginResult check_a2(const QuadraticMap& map, const CertificationConfig& config);

/// min_{1<=n<=H} log|f^n 0| + c sqrt(n).
MarginResult check_a3(const QuadraticMap& map, const CertificationConfig& config);

enum class A4Status { pass, fail, inconclusive };
std::string to_string(A4Status s);

struct PeriodicCycle {
  std::size_t period = 0;
  std::vector<double> points;
  double multiplier = 0.0;  // Df^p along the cycle
};

struct A4Result {
  A4Status status = A4Status::inconclusive;
  std::optional<PeriodicCycle> witness;  // attracting cycle on failure
  double net_coverage = 0.0;             // fraction of core cells visited
  std::size_t newton_failures = 0;
  std::string detail;
};

/// Heuristic mixing check: no attracting cycle of period <= bound (Newton on
/// f^p(x) = x from seeded grids plus the critical-orbit attractor test) and a
/// generic orbit visits every cell of width net_epsilon in [f^2 0, f 0].
A4Result check_a4_heuristic(const QuadraticMap& map, const CertificationConfig& config);

struct ConditionReport {
  double a = 0.0;
  std::size_t horizon = 0;
  MarginResult a2;
  MarginResult a3;
  A4Result a4;
  bool passed = false;
  std::string note;
};

ConditionReport certify(const QuadraticMap& map, const CertificationConfig& config);

struct ScanSummary {
  std::vector<ConditionReport> reports;  // sorted by a
  std::size_t passes = 0;
  double pass_fraction() const {
    return reports.empty() ? 0.0 : static_cast<double>(passes) / static_cast<double>(reports.size());
  }
};

/// One report per grid point of [a_lo, a_hi] (grid >= 1; a single point uses a_lo).
ScanSummary scan_parameters(double a_lo, double a_hi, std::size_t grid, const CertificationConfig& config,
                            int precision_bits = 128, unsigned workers = 1);

}  // namespace bcmf
