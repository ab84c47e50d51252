#pragma once

// Horseshoes for iterates of f, equilibrium statistics of weighted geometric
// potentials on them, spreading to f-invariant measures, the Birkhoff
// spectrum and local dimension estimates.

#include "bcmf/fit.hpp"
#include "bcmf/inducing.hpp"
#include "bcmf/quadratic_map.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcmf {

struct HorseshoeBranch {
  double lo = 0.0;  // K_i
  double hi = 0.0;
  Itinerary itinerary;  // quadratic kinds: signs of f^j on K_i, j < q
  double slope = 0.0;   // linear kind: |DF| on K_i
  int orientation = 1;  // linear kind: +1 if F is increasing on K_i
};

struct Connector {
  double lo = 0.0;  // I^+ inside Lambda^+
  double hi = 0.0;
  std::size_t u = 0;  // f^u maps I^+ onto X-hat
  double tau = 0.0;   // Lambda^+ contains the tau-scaled neighbourhood of I^+
  Itinerary itinerary;
};

/// F = f^q maps each K_i diffeomorphically onto [target_lo, target_hi].
struct Horseshoe {
  enum class Kind { extracted, laps, linear };
  Kind kind = Kind::laps;
  double a = 0.0;
  std::size_t q = 1;
  double target_lo = 0.0;
  double target_hi = 0.0;
  std::vector<HorseshoeBranch> branches;
  std::optional<Connector> connector;  // extracted kind
  std::size_t return_time = 0;         // extracted kind: common R of the branches used

  std::size_t size() const { return branches.size(); }
  std::string kind_name() const;
  /// x = (F|K_i)^{-1}(y); fills orbit[j] = f^j x for j < q when given.
  long double inverse(std::size_t i, long double y, long double* orbit = nullptr) const;
};

struct HorseshoeConfig {
  /// Return time to use; default: the R shared by the most branches.
  std::optional<std::size_t> return_time;
  int target_sign = 1;
  std::size_t connector_budget = 40;  // largest u tried
  double tau = 0.1;
  std::size_t max_branches = 64;
};

/// Branches of the induced map with a common return time and target sign,
/// followed by a connector I^+ -> X-hat = [-x_hat, x_hat].
Horseshoe extract_horseshoe(const QuadraticMap& map, const InducedSystem& system, const HorseshoeConfig& config = {});

/// Laps of f^q inside [target_lo, target_hi] whose image covers it, cut down
/// to the part mapped onto the target.
Horseshoe lap_horseshoe(const QuadraticMap& map, std::size_t q, double target_lo, double target_hi);
/// Target [1 - a, 1] when at least two laps cover it (a = 2), else [-x_hat, x_hat].
Horseshoe lap_horseshoe(const QuadraticMap& map, std::size_t q);

/// Full-branch piecewise-linear map on [lo, hi] with the given slopes; the
/// branches are laid out left to right with equal gaps.
Horseshoe linear_horseshoe(const std::vector<double>& slopes, double lo = 0.0, double hi = 1.0);

struct HorseshoeCheck {
  double max_endpoint_error = 0.0;  // |F(endpoints) - target endpoints| / |target|
  double min_gap = 0.0;             // between consecutive K_i
  bool inside_target = true;
  bool ok = false;
};

HorseshoeCheck verify_horseshoe(const Horseshoe& horseshoe);

/// Words a_0..a_{L-1} over the branches, index = sum a_i m^{L-1-i}.
struct CylinderData {
  std::size_t m = 0;
  std::size_t L = 0;
  std::size_t q = 1;
  std::vector<double> lo, hi;          // K_w
  std::vector<double> log_length;      // log |K_w|
  std::vector<double> log_derivative;  // log |DF^L| at the periodic point of F in K_w
  std::vector<std::vector<double>> birkhoff;  // per observable: S_{qL} phi at that periodic orbit
  std::vector<std::string> observable_names;

  std::size_t words() const { return log_length.size(); }
};

CylinderData enumerate_cylinders(const Horseshoe& horseshoe, const std::vector<Observable>& observables,
                                 std::size_t L, std::size_t max_words = 2'000'000, unsigned workers = 1);

/// (1/l) log sum_w |K_w|^sigma over the words of length l + 1 = L.
double pressure_sum(const CylinderData& cylinders, double sigma);

/// sigma with pressure_sum = 0 (bisection on [0, sigma_hi]); nullopt if no sign change.
std::optional<double> pressure_root(const CylinderData& cylinders, double sigma_hi = 1.5);

/// Statistics of a measure of F = f^q.
struct InducedStats {
  double h = 0.0;         // entropy of F
  double lambda = 0.0;    // int log|DF|
  double birkhoff = 0.0;  // int S_q phi
  double pressure = 0.0;  // (1/L) log sum of weights
  double sigma = 0.0;
  double s = 0.0;
};

/// Weights |K_w|^sigma exp(s S phi) over the words, each spread uniformly on
/// its periodic orbit; h from the block entropies H_L - H_{L-1}.
InducedStats equilibrium_stats(const CylinderData& cylinders, double sigma, double s, std::size_t observable = 0);

struct MeasureStats {
  double h = 0.0;
  double lambda = 0.0;
  double mean = 0.0;  // nu(phi)
  double sigma = 0.0;
  double s = 0.0;
  std::string provenance;

  double free_energy() const { return h - lambda; }
  double ratio() const { return lambda > 0 ? h / lambda : 0.0; }
};

/// Fixed iterate: h = h_F / q, lambda = lambda_F / q, mean = int S_q phi / q.
MeasureStats spread_to_f_invariant(const InducedStats& stats, std::size_t q);
/// Variable return time: divide by int R instead of q.
MeasureStats spread_to_f_invariant(const InducedStats& stats, double mean_return_time);

struct PeriodicOrbit {
  std::size_t period = 0;
  double point = 0.0;  // smallest point of the orbit
  double mean = 0.0;
  double lambda = 0.0;
};

/// Periodic orbits of f of period <= max_period (one per orbit; repelling
/// orbits only, found by iterating inverse branches).
std::vector<PeriodicOrbit> periodic_orbits(const QuadraticMap& map, const Observable& phi, std::size_t max_period);

MeasureStats point_mass_stats(const PeriodicOrbit& orbit);

struct FamilyConfig {
  std::vector<double> sigma_grid;  // default 0, 0.1, ..., 1.5
  std::vector<double> s_grid;      // default -6, -5.5, ..., 6
  std::size_t max_period = 20;
  unsigned workers = 1;

  static FamilyConfig defaults();
};

/// Equilibrium states on the (sigma, s) grid spread to f, plus periodic point masses.
struct MeasureFamily {
  std::vector<MeasureStats> members;
  std::vector<MeasureStats> periodic;
  std::size_t q = 1;
  std::string observable;
};

MeasureFamily build_family(const QuadraticMap& map, const CylinderData& cylinders, const Observable& phi,
                           const FamilyConfig& config, std::size_t observable = 0);

struct SpectrumConfig {
  std::size_t grid_points = 41;
  /// |witness mean - alpha| allowed for single members.
  double alpha_tolerance = 1e-6;
  /// Refine s by bisection at each sigma to hit alpha exactly.
  bool refine = true;
  std::vector<double> refine_sigmas;  // default: the family's sigma grid
};

struct SpectrumCurve {
  std::string observable;
  double c_phi = 0.0;
  double d_phi = 0.0;
  std::vector<double> alpha;
  std::vector<double> B;
  std::vector<std::optional<MeasureStats>> witness;  // empty where no witness exists
};

/// alpha grid over [c_phi, d_phi] unless `alpha_grid` is given.
SpectrumCurve birkhoff_spectrum(const CylinderData& cylinders, const MeasureFamily& family,
                                const SpectrumConfig& config, std::vector<double> alpha_grid = {},
                                std::size_t observable = 0);

/// Best witness for `alpha` under `score` (h / lambda or h - lambda) over the
/// family, the refined members and pairwise convex combinations.
enum class Score { ratio, free_energy };
std::optional<MeasureStats> best_witness(const std::vector<MeasureStats>& candidates, double alpha, Score score,
                                         double tolerance);

/// Members whose mean hits alpha by bisection in s, one per sigma.
std::vector<MeasureStats> refine_members(const CylinderData& cylinders, const std::vector<double>& sigmas,
                                         double alpha, std::size_t q, std::size_t observable = 0);

struct SpectrumPropertyReport {
  std::size_t monotone_violations = 0;
  double max_adjacent_jump = 0.0;
  bool jump_ok = false;
  std::vector<std::string> violations;
  bool passed() const { return monotone_violations == 0 && jump_ok; }
};

/// Non-decreasing up to `mean`, non-increasing after (per-point tolerance),
/// and adjacent jumps at most max_jump. Points without a witness are skipped.
SpectrumPropertyReport spectrum_property_check(const std::vector<double>& alpha, const std::vector<double>& B,
                                               double mean, double tolerance, double max_jump);
SpectrumPropertyReport spectrum_property_check(const SpectrumCurve& curve, double mean, double tolerance,
                                               double max_jump);

/// Mass distribution on disjoint intervals, sorted by lo.
struct CylinderMeasure {
  std::vector<double> lo, hi, mass;

  /// nu(D_r(x)), counting partial overlaps proportionally.
  double ball(double x, double r) const;
};

/// Product (Bernoulli) weights on the words of `cylinders`.
CylinderMeasure bernoulli_measure(const CylinderData& cylinders, const std::vector<double>& probabilities);
/// Equilibrium weights |K_w|^sigma exp(s S phi).
CylinderMeasure equilibrium_measure(const CylinderData& cylinders, double sigma, double s, std::size_t observable = 0);

struct DimensionFit {
  double dimension = 0.0;
  double r_squared = 0.0;
  bool accepted = false;  // R^2 >= 0.9
  std::vector<double> log_radius;
  std::vector<double> log_mass;
};

/// Slope of log nu(D_r(x)) against log r.
DimensionFit local_dimension(const CylinderMeasure& measure, double x, const std::vector<double>& radii);
/// Same, with log nu(D_r(x)) averaged over the points.
DimensionFit local_dimension(const CylinderMeasure& measure, const std::vector<double>& points,
                             const std::vector<double>& radii);
/// Points drawn from the measure (cylinder by mass, then uniform inside).
std::vector<double> sample_points(const CylinderMeasure& measure, std::size_t count, std::uint64_t seed);

}  // namespace bcmf
