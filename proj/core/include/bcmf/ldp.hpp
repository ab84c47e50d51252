#pragma once

// Large deviations under Lebesgue measure: Monte-Carlo deviation
// probabilities (plain and lap-tilted), the Lebesgue pressure
// (1/n) log int e^{S_n phi}, rate functions over a measure family, the
// Legendre comparison and a cylinder covering estimate.

#include "bcmf/quadratic_map.hpp"
#include "bcmf/thermo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcmf {

struct DeviationEstimate {
  std::string observable;
  std::size_t n = 0;
  double alpha_lo = 0.0;  // constraint alpha_lo <= S_n phi / n <= alpha_hi
  double alpha_hi = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string method;        // "plain" or "importance"
  double tilt = 0.0;         // importance: weight exp(tilt * S_m phi) per lap
  std::size_t lap_depth = 0; // importance: laps of f^m in the proposal
  std::size_t hits = 0;
  double measure = 0.0;      // estimated Lebesgue measure of the set
  double log_measure_rate = kNegInf;  // (1/n) log measure
  double std_error = 0.0;             // of the rate (delta method)
  bool needs_tilting = false;         // no hits
};

DeviationEstimate deviation_probability(const QuadraticMap& map, const Observable& phi, double alpha_lo,
                                        double alpha_hi, std::size_t n, std::size_t samples, std::uint64_t seed,
                                        unsigned workers = 1);

/// Proposal: a lap J of f^m drawn with weight |J| exp(tilt S_m phi(mid J)), then
/// x uniform in J; the estimator reweights by Lebesgue / proposal density.
/// Without `tilt`, the tilt is chosen so the proposal's mean of S_m phi / m
/// sits at the window centre.
DeviationEstimate deviation_probability_tilted(const QuadraticMap& map, const Observable& phi, double alpha_lo,
                                               double alpha_hi, std::size_t n, std::size_t samples,
                                               std::uint64_t seed, std::optional<double> tilt = std::nullopt,
                                               std::size_t lap_depth = 14, unsigned workers = 1);

struct FreeEnergyEstimate {
  std::string observable;
  std::size_t n = 0;
  std::string method;      // "quadrature" or "monte-carlo"
  double value = 0.0;      // (1/n) log int_X e^{S_n phi} dx
  double correction = 0.0; // (log |X|) / n = (log 2) / n
  double std_error = 0.0;  // monte-carlo only
  std::size_t laps = 0;    // quadrature only

  double corrected() const { return value - correction; }
};

/// Gauss-Legendre with `nodes` in {7, 10, 15, 20} on every lap of f^n (n <= 22).
FreeEnergyEstimate free_energy_quadrature(const QuadraticMap& map, const Observable& phi, std::size_t n,
                                          unsigned nodes = 10);
FreeEnergyEstimate free_energy_monte_carlo(const QuadraticMap& map, const Observable& phi, std::size_t n,
                                           std::size_t samples, std::uint64_t seed, unsigned workers = 1);

/// Limit estimate from values at two n assuming r_n = r + c / n.
double richardson(double r1, std::size_t n1, double r2, std::size_t n2);

struct RateCurve {
  std::string observable;
  std::vector<double> alpha;
  std::vector<double> F;  // -infinity where no witness
  std::vector<std::optional<MeasureStats>> witness;
};

struct RateConfig {
  double alpha_tolerance = 1e-6;
  bool refine = true;
  std::vector<double> refine_sigmas{1.0};
};

/// F_phi(alpha) = max of h - lambda over the family (members, periodic point
/// masses, refined members and convex combinations) with mean alpha.
RateCurve rate_function(const CylinderData& cylinders, const MeasureFamily& family,
                        const std::vector<double>& alpha_grid, const RateConfig& config = {},
                        std::size_t observable = 0);

/// max over the family of nu(phi) + h - lambda.
double family_legendre_max(const MeasureFamily& family);

struct LegendreRow {
  std::string observable;
  std::size_t n = 0;
  double P_n = 0.0;
  double family_max = 0.0;
  double correction = 0.0;        // (log 2) / n
  double delta_raw = 0.0;         // |P_n - family_max|
  double delta_corrected = 0.0;   // |P_n - correction - family_max|
  bool passed = false;            // delta_corrected <= threshold
};

struct LegendreReport {
  std::vector<LegendreRow> rows;
  double threshold = 0.0;
  bool passed() const;
};

/// One family per observable, built with that observable as the tilt.
LegendreReport legendre_check(const QuadraticMap& map, const std::vector<Observable>& observables,
                              const std::vector<MeasureFamily>& families, std::size_t n, double threshold = 0.02,
                              unsigned nodes = 10);

struct CoveringEstimate {
  std::size_t n = 0;
  std::size_t cylinders = 0;  // laps of f^n in the domain
  std::size_t selected = 0;   // laps whose midpoint meets the constraint
  double total_length = 0.0;
  double rate = kNegInf;      // (1/n) log total_length
};

/// Laps of f^n in [lo, hi] whose midpoint has alpha_lo <= S_n phi / n <= alpha_hi.
CoveringEstimate covering_estimate(const QuadraticMap& map, const Observable& phi, double alpha_lo, double alpha_hi,
                                   std::size_t n, double lo = -1.0, double hi = 1.0,
                                   std::size_t max_laps = 1u << 24);

}  // namespace bcmf
