#pragma once

// Induced full-branch Markov map over Lambda = Lambda^- u Lambda^+, built by
// iterating, subdividing and stopping intervals; return-time tails, the
// tower map, quick-return and distortion checks.

#include "bcmf/binding.hpp"
#include "bcmf/fit.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bcmf {

struct InducingConfig {
  std::size_t T_max = 60;
  /// Extended precision is enough once intervals below min_mass are pruned.
  int precision_bits = 64;
  /// Intervals shorter than min_mass * |Lambda^+| are not followed further;
  /// their mass goes to the tail.
  double min_mass = 1e-5;
  /// Interval-steps allowed before the construction stops (runtime guard).
  std::size_t max_steps = 400'000'000;
  /// Times k at which the live partition of {R > k} is recorded for the
  /// quick-return check.
  std::vector<std::size_t> snapshot_times;

  void validate() const;
};

struct InducedBranch {
  double lo = 0.0;  // domain, rounded to double
  double hi = 0.0;
  double length = 0.0;  // computed at working precision
  std::size_t R = 0;
  int domain_sign = 1;  // side of Lambda holding the domain
  int target_sign = 1;  // f^R maps the domain onto Lambda^{target_sign}
  bool monotone = true;
  /// Scaled-neighbourhood margin of the parent image around the target.
  double xi = 0.0;
  /// Max sampled |Df^R(x)| / |Df^R(y)|; filled by distortion_check.
  double distortion_sample = 0.0;
  Itinerary itinerary;  // signs of f^i on the domain, i < R
  /// Live element (index into the snapshot) this branch descends from, per snapshot time.
  std::vector<std::uint32_t> snapshot_ids;
};

struct Snapshot {
  std::size_t time = 0;
  std::vector<double> lengths;  // live elements of {R > time} on Lambda^+
};

struct InducedSystem {
  double a = 0.0;
  double epsilon = 0.0;
  double lambda_lo = 0.0;  // Lambda^+ = [lambda_lo, lambda_hi]
  double lambda_hi = 0.0;
  double delta = 0.0;
  std::size_t T_max = 0;
  std::vector<InducedBranch> branches;  // both sides, sorted by lo
  /// tail[n] = |{R > n}|, n = 0..T_max, over Lambda (both sides).
  std::vector<double> tail;
  double lambda_measure = 0.0;   // |Lambda|
  double deep_loss = 0.0;        // mass sent below the last partition point
  double pruned = 0.0;           // mass of intervals dropped below min_mass
  double unreturned = 0.0;       // live mass at T_max (or when max_steps ran out)
  std::size_t binding_breakdowns = 0;
  std::size_t steps = 0;         // interval-steps processed
  bool budget_exhausted = false;
  std::vector<Snapshot> snapshots;

  double coverage() const;
  /// Branch whose domain contains x (domain endpoints in double).
  std::optional<std::size_t> branch_of(double x) const;
};

/// Builds Q and R on Lambda from the critical partition.
InducedSystem build_induced_map(const QuadraticMap& map, const CriticalPartition& partition,
                                const InducingConfig& config);

struct TailFit {
  double zeta = 0.0;        // exp(slope)
  double C1 = 0.0;          // exp(intercept) / tail[0]
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t first_n = 0;  // fitted window [first_n, last_n]
  std::size_t last_n = 0;
  bool accepted = false;    // slope < 0 and R^2 >= 0.9
  std::string note;
};

/// Fit of log tail[n] against n over the longest window of at least 10
/// points that is linear (R^2 >= 0.99, else >= 0.9); accepted if the slope is
/// negative and R^2 >= 0.9.
TailFit return_time_tail(std::span<const double> tail);
TailFit return_time_tail(const InducedSystem& system);

struct TowerPoint {
  double x = 0.0;
  std::size_t level = 0;
};

/// (x, l + 1) while l + 1 < R(x), else (f^R x, 0). DomainError if x has no branch
/// or l >= R(x).
TowerPoint tower_step(const QuadraticMap& map, const InducedSystem& system, TowerPoint p);

struct QuickReturnRow {
  std::size_t k = 0;
  std::size_t elements = 0;
  std::size_t violations = 0;
  double min_log_ratio_margin = 0.0;  // min over elements of log(|w~|/|w|) + sqrt(eps) k
  double window_hi = 0.0;             // (1 + 19 eps / lambda) k
  bool window_truncated = false;      // window reaches past T_max
};

struct QuickReturnReport {
  std::vector<QuickReturnRow> rows;
  std::size_t total_violations() const;
};

QuickReturnReport quick_return_check(const InducedSystem& system, double lambda);

struct DistortionReport {
  std::size_t branches = 0;
  double max_ratio = 1.0;
  std::size_t koebe_violations = 0;
  double max_ratio_over_koebe = 0.0;  // max of sampled ratio / ((1+xi)/xi)^2
};

/// Samples points of each branch (uniform in the target, pulled back) and
/// compares the sampled distortion with the Koebe bound from the branch's xi.
DistortionReport distortion_check(InducedSystem& system, std::size_t samples_per_branch, int precision_bits = 64);

/// Koebe bound ((1 + xi) / xi)^2.
inline double koebe_bound(double xi) { return ((1.0 + xi) / xi) * ((1.0 + xi) / xi); }

struct MarkovReport {
  std::size_t branches = 0;
  double max_relative_error = 0.0;  // |f^R(endpoint) - target endpoint| / |Lambda^+|
  std::size_t sign_violations = 0;  // forward orbit leaves its itinerary
};

/// Recomputes branch endpoints from their itineraries at `precision_bits`,
/// iterates them forward and compares with the target endpoints.
MarkovReport markov_check(const InducedSystem& system, int precision_bits = 113);

}  // namespace bcmf
