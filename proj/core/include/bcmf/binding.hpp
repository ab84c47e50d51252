#pragma once

// Bound periods: the delta_p scale, the critical partition {I_{p,j}} with
// slowly recurrent anchor points, and numerical checks of the expansion
// estimates outside and inside the critical region.

#include "bcmf/quadratic_map.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcmf {

struct BindingConfig {
  double epsilon = 0.01;
  std::size_t N = 5;
  std::size_t p_max = 30;
  std::size_t anchor_horizon = 1000;
  /// The 1/10 in delta_p^2 = (e^{-eps p} / 10) / sum.
  double delta_constant = 0.1;
  /// Raw cells per annulus: floor(e^{cut_exponent * eps * p}).
  double cut_exponent = 3.0;
  /// Laps explored per cell before the anchor search gives up.
  std::size_t anchor_lap_budget = 10000;
  int precision_bits = 128;

  void validate() const;
};

struct DeltaTable {
  double a = 0.0;
  double epsilon = 0.0;
  std::size_t N = 0;
  std::size_t p_max = 0;
  /// deltas[p - 1] = delta_p for p = 1 .. p_max.
  std::vector<double> deltas;

  double delta(std::size_t p) const { return deltas.at(p - 1); }
};

/// delta_p for p = 1..p_max along the critical orbit at config precision.
/// Throws DomainError if |f^{i+1} 0| < 1e-14 (critical return).
DeltaTable compute_delta_table(const QuadraticMap& map, const BindingConfig& config);

/// The p with delta_p <= |x| < delta_{p-1}, N < p <= p_max; none outside
/// [delta_{p_max}, delta_N).
std::optional<std::size_t> bound_period(double x, const DeltaTable& table);

struct LemmaPRow {
  std::size_t p = 0;
  std::size_t samples = 0;
  double min_expansion_margin = 0.0;  // min (1/p) log|Df^p x| - lambda/3
  double min_lower_margin = 0.0;      // min p - log|x|^{-2/log 5}
  double min_upper_margin = 0.0;      // min log|x|^{-2/lambda} - p
  std::size_t expansion_violations = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
};

struct LemmaPReport {
  std::vector<LemmaPRow> rows;  // one per annulus
  std::size_t total_violations() const;
};

/// Uniform samples from each annulus [delta_p, delta_{p-1}), p_lo <= p <= p_hi.
LemmaPReport verify_lemma_P(const QuadraticMap& map, const DeltaTable& table, double lambda, std::size_t p_lo,
                            std::size_t p_hi, std::size_t sample_count, std::uint64_t seed, unsigned workers = 1);

struct ExpansionSample {
  double x = 0.0;
  std::size_t n = 0;
};

struct OutsideExpansionReport {
  std::size_t pairs = 0;  // (x, n) pairs checked
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t return_pairs = 0;  // pairs with |f^n x| < delta_hat
  std::size_t return_violations = 0;
  double min_return_margin = std::numeric_limits<double>::infinity();
  std::optional<ExpansionSample> worst;
};

/// Checks |Df^n x| >= delta_hat e^{lambda n / 3} for the given pairs (orbit
/// must stay outside (-delta_hat, delta_hat) for n steps; pairs that do not
/// are skipped) and |Df^n x| >= e^{lambda n / 3} when |f^n x| < delta_hat.
OutsideExpansionReport verify_outside_expansion(const QuadraticMap& map, double delta_hat, double lambda,
                                                const std::vector<ExpansionSample>& samples);

/// Random sweep: uniform x, every n up to max_n while the orbit stays outside.
OutsideExpansionReport verify_outside_expansion(const QuadraticMap& map, double delta_hat, double lambda,
                                                std::size_t sample_count, std::size_t max_n, std::uint64_t seed);

/// Raw cell \hat I_{p,j}: [lo, hi), j = 1 at the right end of the annulus.
struct RawCell {
  std::size_t p = 0;
  std::size_t j = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// An anchor is a preimage of +-x_hat: f^k(x) = target_sign * x_hat with
/// sign(f^i x) = itinerary[i], so it can be recomputed at any precision.
struct Anchor {
  double x = 0.0;
  Itinerary itinerary;
  int target_sign = 1;
  double recurrence_margin = 0.0;  // min_n |f^n x| / (delta_N e^{-eps n}), log scale
};

/// The anchor recomputed at precision Real from its itinerary.
template <class Real>
Real anchor_point(double a, const Anchor& anchor) {
  const Real x_hat = orientation_reversing_fixed_point<Real>(a);
  return pull_back<Real>(a, anchor.target_sign > 0 ? x_hat : Real(-x_hat), anchor.itinerary);
}

struct PartitionElement {
  std::size_t p = 0;  // labels of the unique raw cell it contains
  std::size_t j = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t lo_anchor = 0;  // indices into CriticalPartition::anchors
  std::size_t hi_anchor = 0;
};

struct CriticalPartition {
  double a = 0.0;
  BindingConfig config;
  DeltaTable table;
  std::vector<RawCell> cells;          // right to left
  std::vector<Anchor> anchors;         // anchors[k] lies in cells[k]
  std::vector<PartitionElement> elements;  // right to left, positive side
  double delta = 0.0;                  // = anchors[0].x
  double deep_cutoff = 0.0;            // left end of the last element
  double lambda_lo = 0.0;              // Lambda^+ = [lambda_lo, lambda_hi]
  double lambda_hi = 0.0;
  bool reverified = false;             // anchors re-checked at doubled precision

  /// Element containing x (by |x|, with mirror symmetry); none outside [deep_cutoff, delta].
  std::optional<std::size_t> element_of(double x) const;
};

/// Anchor x in `cell` passing |f^n x| >= delta_N e^{-eps n} for
/// ceil(1/eps) <= n <= horizon, at config precision. Throws DomainError
/// naming the cell when the lap budget is exhausted.
Anchor find_anchor(const QuadraticMap& map, const RawCell& cell, double delta_N, const BindingConfig& config);

/// Recomputes the anchor orbit from its itinerary at `bits` and reruns the
/// recurrence test; returns the log-scale margin (negative = failure).
double anchor_recurrence_margin(double a, const Anchor& anchor, double delta_N, const BindingConfig& config, int bits);

CriticalPartition build_critical_partition(const QuadraticMap& map, const BindingConfig& config,
                                           unsigned workers = 1);

}  // namespace bcmf
