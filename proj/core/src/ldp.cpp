#include "bcmf/ldp.hpp"

#include "bcmf/laps.hpp"
#include "bcmf/parallel.hpp"
#include "bcmf/rng.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bcmf {

namespace {

constexpr std::size_t kBlock = 4096;

double birkhoff_sum(const QuadraticMap& map, const Observable& phi, double x, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += phi(x);
    x = map(x);
  }
  return s;
}

long double birkhoff_sum_ld(const QuadraticMap& map, const Observable& phi, long double x, std::size_t n) {
  long double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += phi(static_cast<double>(x));
    x = map(x);
  }
  return s;
}

void check_window(double lo, double hi, std::size_t n, std::size_t samples) {
  if (n < 1) throw DomainError("n must be at least 1");
  if (!(lo <= hi)) throw DomainError("empty deviation window");
  if (samples < 1000) throw DomainError("at least 1000 samples required");
}

struct BlockSums {
  double sum = 0, sum_sq = 0;
  std::size_t hits = 0;
};

// Runs sample(rng, out) over fixed-size blocks seeded by block index, so the
// result does not depend on the worker count.
template <class Sample>
BlockSums run_blocks(std::size_t samples, std::uint64_t seed, unsigned workers, Sample&& sample) {
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<BlockSums> part(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    const std::size_t count = std::min(kBlock, samples - b * kBlock);
    for (std::size_t i = 0; i < count; ++i) sample(rng, part[b]);
  });
  BlockSums total;
  for (const auto& p : part) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.hits += p.hits;
  }
  return total;
}

void finish(DeviationEstimate& est, double mean, double se_mean) {
  est.measure = mean;
  if (est.hits == 0 || !(mean > 0)) {
    est.needs_tilting = true;
    est.log_measure_rate = kNegInf;
    est.std_error = 0;
    return;
  }
  const double n = static_cast<double>(est.n);
  est.log_measure_rate = std::log(mean) / n;
  est.std_error = se_mean / (mean * n);
}

}  // namespace

DeviationEstimate deviation_probability(const QuadraticMap& map, const Observable& phi, double alpha_lo,
                                        double alpha_hi, std::size_t n, std::size_t samples, std::uint64_t seed,
                                        unsigned workers) {
  map.validate();
  check_window(alpha_lo, alpha_hi, n, samples);
  DeviationEstimate est{phi.name, n, alpha_lo, alpha_hi, samples, seed, "plain"};
  const double nd = static_cast<double>(n);
  auto tot = run_blocks(samples, seed, workers, [&](Rng& rng, BlockSums& out) {
    const double avg = birkhoff_sum(map, phi, uniform(rng, -1.0, 1.0), n) / nd;
    if (avg >= alpha_lo && avg <= alpha_hi) ++out.hits;
  });
  est.hits = tot.hits;
  const double p = static_cast<double>(tot.hits) / static_cast<double>(samples);
  const double se_p = std::sqrt(p * (1 - p) / static_cast<double>(samples));
  finish(est, 2.0 * p, 2.0 * se_p);
  return est;
}

DeviationEstimate deviation_probability_tilted(const QuadraticMap& map, const Observable& phi, double alpha_lo,
                                               double alpha_hi, std::size_t n, std::size_t samples,
                                               std::uint64_t seed, std::optional<double> tilt, std::size_t lap_depth,
                                               unsigned workers) {
  map.validate();
  check_window(alpha_lo, alpha_hi, n, samples);
  if (lap_depth < 1 || lap_depth > n) throw DomainError("lap depth must lie in [1, n]");
  std::vector<double> lo, len, sm;
  for_each_lap(map, -1.0, 1.0, lap_depth, [&](const Lap& lap) {
    lo.push_back(static_cast<double>(lap.lo));
    len.push_back(static_cast<double>(lap.hi - lap.lo));
    sm.push_back(static_cast<double>(birkhoff_sum_ld(map, phi, 0.5L * (lap.lo + lap.hi), lap_depth)));
  });
  const double md = static_cast<double>(lap_depth);
  auto log_weights = [&](double s) {
    std::vector<double> lw(len.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = std::log(len[i]) + s * sm[i];
    return lw;
  };
  auto proposal_mean = [&](double s) {
    auto lw = log_weights(s);
    const double mx = *std::max_element(lw.begin(), lw.end());
    double z = 0, acc = 0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
      const double w = std::exp(lw[i] - mx);
      z += w;
      acc += w * sm[i] / md;
    }
    return acc / z;
  };
  double s = 0;
  if (tilt) {
    s = *tilt;
  } else {
    const double target = 0.5 * (alpha_lo + alpha_hi);
    double a = -64, b = 64;
    if (proposal_mean(a) > target) {
      s = a;
    } else if (proposal_mean(b) < target) {
      s = b;
    } else {
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (a + b);
        (proposal_mean(mid) < target ? a : b) = mid;
      }
      s = 0.5 * (a + b);
    }
  }
  auto lw = log_weights(s);
  const double mx = *std::max_element(lw.begin(), lw.end());
  std::vector<double> w(lw.size()), cum(lw.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(lw[i] - mx);
  std::partial_sum(w.begin(), w.end(), cum.begin());
  const double W = cum.back();

  DeviationEstimate est{phi.name, n, alpha_lo, alpha_hi, samples, seed, "importance", s, lap_depth};
  const double nd = static_cast<double>(n);
  auto tot = run_blocks(samples, seed, workers, [&](Rng& rng, BlockSums& out) {
    const double u = uniform(rng, 0.0, W);
    std::size_t j = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    j = std::min(j, cum.size() - 1);
    const double x = lo[j] + len[j] * uniform(rng);
    const double avg = birkhoff_sum(map, phi, x, n) / nd;
    if (avg >= alpha_lo && avg <= alpha_hi) {
      const double r = W * len[j] / w[j];  // Lebesgue density / proposal density
      ++out.hits;
      out.sum += r;
      out.sum_sq += r * r;
    }
  });
  est.hits = tot.hits;
  const double N = static_cast<double>(samples);
  const double mean = tot.sum / N;
  const double var = std::max(0.0, tot.sum_sq / N - mean * mean);
  finish(est, mean, std::sqrt(var / N));
  return est;
}

namespace {

template <unsigned N>
long double gauss_lap(const std::function<long double(long double)>& f, long double a, long double b) {
  return boost::math::quadrature::gauss<long double, N>::integrate(f, a, b);
}

}  // namespace

FreeEnergyEstimate free_energy_quadrature(const QuadraticMap& map, const Observable& phi, std::size_t n,
                                          unsigned nodes) {
  map.validate();
  if (n < 1 || n > 22) throw DomainError("quadrature needs 1 <= n <= 22; use monte-carlo beyond");
  decltype(&gauss_lap<10>) rule = nullptr;
  switch (nodes) {
    case 7: rule = &gauss_lap<7>; break;
    case 10: rule = &gauss_lap<10>; break;
    case 15: rule = &gauss_lap<15>; break;
    case 20: rule = &gauss_lap<20>; break;
    default: throw DomainError("quadrature nodes must be 7, 10, 15 or 20");
  }
  FreeEnergyEstimate est;
  est.observable = phi.name;
  est.n = n;
  est.method = "quadrature";
  long double total = 0;
  const std::function<long double(long double)> integrand = [&](long double x) {
    return std::exp(birkhoff_sum_ld(map, phi, x, n));
  };
  est.laps = for_each_lap(map, -1.0, 1.0, n, [&](const Lap& lap) { total += rule(integrand, lap.lo, lap.hi); });
  const double nd = static_cast<double>(n);
  est.value = static_cast<double>(std::log(total)) / nd;
  est.correction = std::numbers::ln2 / nd;
  return est;
}

FreeEnergyEstimate free_energy_monte_carlo(const QuadraticMap& map, const Observable& phi, std::size_t n,
                                           std::size_t samples, std::uint64_t seed, unsigned workers) {
  map.validate();
  if (n < 1) throw DomainError("n must be at least 1");
  if (samples < 2) throw DomainError("at least two samples required");
  auto tot = run_blocks(samples, seed, workers, [&](Rng& rng, BlockSums& out) {
    const double v = 2.0 * std::exp(birkhoff_sum(map, phi, uniform(rng, -1.0, 1.0), n));
    out.sum += v;
    out.sum_sq += v * v;
  });
  const double N = static_cast<double>(samples), nd = static_cast<double>(n);
  const double mean = tot.sum / N;
  const double var = std::max(0.0, tot.sum_sq / N - mean * mean);
  FreeEnergyEstimate est;
  est.observable = phi.name;
  est.n = n;
  est.method = "monte-carlo";
  est.value = std::log(mean) / nd;
  est.std_error = std::sqrt(var / N) / (mean * nd);
  est.correction = std::numbers::ln2 / nd;
  return est;
}

double richardson(double r1, std::size_t n1, double r2, std::size_t n2) {
  if (n1 == n2) throw DomainError("richardson needs two different n");
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  return (b * r2 - a * r1) / (b - a);
}

RateCurve rate_function(const CylinderData& cd, const MeasureFamily& fam, const std::vector<double>& alpha_grid,
                        const RateConfig& config, std::size_t observable) {
  RateCurve curve;
  curve.observable = fam.observable;
  std::vector<MeasureStats> base = fam.members;
  base.insert(base.end(), fam.periodic.begin(), fam.periodic.end());
  if (base.empty()) throw DomainError("empty measure family");
  double c = base.front().mean, d = c;
  for (const auto& m : base) {
    c = std::min(c, m.mean);
    d = std::max(d, m.mean);
  }
  for (double alpha : alpha_grid) {
    auto cand = base;
    if (config.refine && alpha > c && alpha < d) {
      auto extra = refine_members(cd, config.refine_sigmas, alpha, fam.q, observable);
      cand.insert(cand.end(), extra.begin(), extra.end());
    }
    auto w = best_witness(cand, alpha, Score::free_energy, config.alpha_tolerance);
    curve.alpha.push_back(alpha);
    curve.F.push_back(w ? w->free_energy() : kNegInf);
    curve.witness.push_back(w);
  }
  return curve;
}

double family_legendre_max(const MeasureFamily& fam) {
  double best = kNegInf;
  for (const auto* set : {&fam.members, &fam.periodic})
    for (const auto& m : *set) best = std::max(best, m.mean + m.free_energy());
  return best;
}

bool LegendreReport::passed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.passed; });
}

LegendreReport legendre_check(const QuadraticMap& map, const std::vector<Observable>& observables,
                              const std::vector<MeasureFamily>& families, std::size_t n, double threshold,
                              unsigned nodes) {
  if (observables.size() != families.size()) throw DomainError("one family per observable required");
  LegendreReport rep;
  rep.threshold = threshold;
  for (std::size_t i = 0; i < observables.size(); ++i) {
    auto P = free_energy_quadrature(map, observables[i], n, nodes);
    LegendreRow row;
    row.observable = observables[i].name;
    row.n = n;
    row.P_n = P.value;
    row.correction = P.correction;
    row.family_max = family_legendre_max(families[i]);
    row.delta_raw = std::abs(P.value - row.family_max);
    row.delta_corrected = std::abs(P.corrected() - row.family_max);
    row.passed = row.delta_corrected <= threshold;
    rep.rows.push_back(row);
  }
  return rep;
}

CoveringEstimate covering_estimate(const QuadraticMap& map, const Observable& phi, double alpha_lo, double alpha_hi,
                                   std::size_t n, double lo, double hi, std::size_t max_laps) {
  if (n < 1) throw DomainError("n must be at least 1");
  if (!(alpha_lo <= alpha_hi)) throw DomainError("empty constraint window");
  CoveringEstimate est;
  est.n = n;
  const long double nd = static_cast<long double>(n);
  long double total = 0;
  est.cylinders = for_each_lap(
      map, lo, hi, n,
      [&](const Lap& lap) {
        const long double avg = birkhoff_sum_ld(map, phi, 0.5L * (lap.lo + lap.hi), n) / nd;
        if (avg >= alpha_lo && avg <= alpha_hi) {
          ++est.selected;
          total += lap.hi - lap.lo;
        }
      },
      max_laps);
  est.total_length = static_cast<double>(total);
  if (total > 0) est.rate = static_cast<double>(std::log(total) / nd);
  return est;
}

}  // namespace bcmf
