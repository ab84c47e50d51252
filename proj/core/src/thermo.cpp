#include "bcmf/thermo.hpp"

#include "bcmf/laps.hpp"
#include "bcmf/parallel.hpp"
#include "bcmf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace bcmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
  double mx = -kInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == -kInf) return -kInf;
  double acc = 0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// Words of length L have m^L entries; throws past `limit`.
std::size_t word_count(std::size_t m, std::size_t L, std::size_t limit) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < L; ++i) {
    if (n > limit / std::max<std::size_t>(m, 1)) throw DomainError("cylinder count exceeds the budget");
    n *= m;
  }
  if (n > limit) throw DomainError("cylinder count exceeds the budget");
  return n;
}

}  // namespace

std::string Horseshoe::kind_name() const {
  switch (kind) {
    case Kind::extracted: return "extracted";
    case Kind::laps: return "laps";
    case Kind::linear: return "linear";
  }
  return "unknown";
}

long double Horseshoe::inverse(std::size_t i, long double y, long double* orbit) const {
  const auto& b = branches[i];
  if (kind == Kind::linear) {
    const long double t = (y - static_cast<long double>(target_lo)) / static_cast<long double>(b.slope);
    const long double x = b.orientation > 0 ? b.lo + t : b.hi - t;
    if (orbit) orbit[0] = x;
    return x;
  }
  for (std::size_t j = q; j-- > 0;) {
    y = inverse_branch<long double>(a, y, b.itinerary[j]);
    if (orbit) orbit[j] = y;
  }
  return y;
}

Horseshoe extract_horseshoe(const QuadraticMap& map, const InducedSystem& system, const HorseshoeConfig& config) {
  if (system.branches.empty()) throw DomainError("induced system has no branches");
  std::map<std::size_t, std::vector<std::size_t>> by_time;
  for (std::size_t i = 0; i < system.branches.size(); ++i)
    if (system.branches[i].target_sign == config.target_sign) by_time[system.branches[i].R].push_back(i);
  std::size_t t0 = 0;
  if (config.return_time) {
    t0 = *config.return_time;
    if (by_time[t0].size() < 2)
      throw DomainError("fewer than two branches with return time " + std::to_string(t0));
  } else {
    std::size_t best = 0;
    for (const auto& [t, ids] : by_time)
      if (ids.size() > best) {
        best = ids.size();
        t0 = t;
      }
    if (best < 2) throw DomainError("no two branches share a return time and target; increase T_max");
  }
  auto ids = by_time[t0];
  // Keep the longest branches.
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t x, std::size_t y) {
    return system.branches[x].length > system.branches[y].length;
  });
  if (ids.size() > config.max_branches) ids.resize(config.max_branches);

  // Connector: a lap of f^u inside Lambda^+ covering X-hat, tau-margin inside Lambda^+.
  const long double x_hat = orientation_reversing_fixed_point<long double>(map.a);
  std::optional<Connector> conn;
  for (std::size_t u = 1; u <= config.connector_budget && !conn; ++u) {
    for_each_lap(
        map, system.lambda_lo, system.lambda_hi, u,
        [&](const Lap& lap) {
          const long double ilo = std::min(lap.image_lo, lap.image_hi), ihi = std::max(lap.image_lo, lap.image_hi);
          if (ilo > -x_hat || ihi < x_hat) return;
          const long double p = pull_back<long double>(map.a, -x_hat, *lap.itinerary);
          const long double r = pull_back<long double>(map.a, x_hat, *lap.itinerary);
          const double lo = static_cast<double>(std::min(p, r)), hi = static_cast<double>(std::max(p, r));
          const double pad = config.tau * (hi - lo);
          if (lo - pad < system.lambda_lo || hi + pad > system.lambda_hi) return;
          if (!conn || hi - lo > conn->hi - conn->lo)
            conn = Connector{lo, hi, u, config.tau, *lap.itinerary};
        },
        1u << 22);
  }
  if (!conn) throw DomainError("connector not found within " + std::to_string(config.connector_budget) + " steps");

  Horseshoe h;
  h.kind = Horseshoe::Kind::extracted;
  h.a = map.a;
  h.q = t0 + conn->u;
  h.target_lo = -static_cast<double>(x_hat);
  h.target_hi = static_cast<double>(x_hat);
  h.connector = conn;
  h.return_time = t0;
  Itinerary link = conn->itinerary;
  if (config.target_sign < 0) link[0] = static_cast<std::int8_t>(-link[0]);  // mirror onto Lambda^-
  for (std::size_t id : ids) {
    const auto& br = system.branches[id];
    HorseshoeBranch b;
    b.itinerary = br.itinerary;
    b.itinerary.insert(b.itinerary.end(), link.begin(), link.end());
    const long double p = pull_back<long double>(map.a, -x_hat, b.itinerary);
    const long double r = pull_back<long double>(map.a, x_hat, b.itinerary);
    b.lo = static_cast<double>(std::min(p, r));
    b.hi = static_cast<double>(std::max(p, r));
    h.branches.push_back(std::move(b));
  }
  std::sort(h.branches.begin(), h.branches.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
  return h;
}

Horseshoe lap_horseshoe(const QuadraticMap& map, std::size_t q, double target_lo, double target_hi) {
  if (q < 1) throw DomainError("horseshoe iterate must be at least 1");
  if (!(target_lo < target_hi)) throw DomainError("empty horseshoe target");
  Horseshoe h;
  h.kind = Horseshoe::Kind::laps;
  h.a = map.a;
  h.q = q;
  h.target_lo = target_lo;
  h.target_hi = target_hi;
  const long double slack = 1e-12L * (target_hi - target_lo);
  for_each_lap(map, target_lo, target_hi, q, [&](const Lap& lap) {
    const long double ilo = std::min(lap.image_lo, lap.image_hi), ihi = std::max(lap.image_lo, lap.image_hi);
    if (ilo > target_lo + slack || ihi < target_hi - slack) return;
    HorseshoeBranch b;
    b.itinerary = *lap.itinerary;
    const long double p = pull_back<long double>(map.a, target_lo, b.itinerary);
    const long double r = pull_back<long double>(map.a, target_hi, b.itinerary);
    b.lo = static_cast<double>(std::max(std::min(p, r), lap.lo));
    b.hi = static_cast<double>(std::min(std::max(p, r), lap.hi));
    h.branches.push_back(std::move(b));
  });
  if (h.branches.size() < 2) throw DomainError("fewer than two laps of f^q cover the target");
  return h;
}

Horseshoe lap_horseshoe(const QuadraticMap& map, std::size_t q) {
  try {
    return lap_horseshoe(map, q, 1.0 - map.a, 1.0);
  } catch (const DomainError&) {
    const double x_hat = orientation_reversing_fixed_point<double>(map.a);
    return lap_horseshoe(map, q, -x_hat, x_hat);
  }
}

Horseshoe linear_horseshoe(const std::vector<double>& slopes, double lo, double hi) {
  if (slopes.size() < 2) throw DomainError("a horseshoe needs at least two branches");
  if (!(lo < hi)) throw DomainError("empty horseshoe target");
  const double W = hi - lo;
  double used = 0;
  for (double s : slopes) {
    if (!(s > 1.0)) throw DomainError("linear horseshoe slopes must exceed 1");
    used += W / s;
  }
  if (used > W * (1 + 1e-15)) throw DomainError("branches do not fit: sum of 1/slope exceeds 1");
  const double gap = std::max(0.0, W - used) / static_cast<double>(slopes.size() + 1);
  Horseshoe h;
  h.kind = Horseshoe::Kind::linear;
  h.q = 1;
  h.target_lo = lo;
  h.target_hi = hi;
  double x = lo + gap;
  for (double s : slopes) {
    HorseshoeBranch b;
    b.lo = x;
    b.hi = std::min(hi, x + W / s);
    b.slope = s;
    b.orientation = 1;
    x = b.hi + gap;
    h.branches.push_back(std::move(b));
  }
  return h;
}

HorseshoeCheck verify_horseshoe(const Horseshoe& h) {
  HorseshoeCheck c;
  const double W = h.target_hi - h.target_lo;
  c.min_gap = kInf;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& b = h.branches[i];
    if (b.lo < h.target_lo - 1e-12 * W || b.hi > h.target_hi + 1e-12 * W) c.inside_target = false;
    if (i + 1 < h.size()) c.min_gap = std::min(c.min_gap, h.branches[i + 1].lo - b.hi);
    double e1, e2;
    if (h.kind == Horseshoe::Kind::linear) {
      // F is affine on K_i with F(K_i) starting at target_lo.
      e1 = 0;
      e2 = std::abs(h.target_lo + b.slope * (b.hi - b.lo) - h.target_hi);
    } else {
      // Endpoints recomputed at 113 bits and iterated forward.
      using R = Real113;
      const QuadraticMap f(h.a);
      const R p = iterate_n(f, pull_back<R>(h.a, R(h.target_lo), b.itinerary), h.q);
      const R r = iterate_n(f, pull_back<R>(h.a, R(h.target_hi), b.itinerary), h.q);
      e1 = static_cast<double>(rabs(p - R(h.target_lo)));
      e2 = static_cast<double>(rabs(r - R(h.target_hi)));
      // The stored double endpoints must match the recomputed ones.
      const double lo = static_cast<double>(std::min(pull_back<R>(h.a, R(h.target_lo), b.itinerary),
                                                     pull_back<R>(h.a, R(h.target_hi), b.itinerary)));
      if (std::abs(lo - b.lo) > 1e-12 * W) c.inside_target = false;
    }
    c.max_endpoint_error = std::max({c.max_endpoint_error, e1 / W, e2 / W});
  }
  if (h.size() < 2) c.min_gap = 0;
  c.ok = c.max_endpoint_error < 1e-9 && c.min_gap >= 0 && c.inside_target;
  return c;
}

CylinderData enumerate_cylinders(const Horseshoe& h, const std::vector<Observable>& observables, std::size_t L,
                                 std::size_t max_words, unsigned workers) {
  if (L < 1) throw DomainError("cylinder depth must be at least 1");
  if (h.size() < 2) throw DomainError("horseshoe needs at least two branches");
  const std::size_t m = h.size();
  const std::size_t n = word_count(m, L, max_words);
  CylinderData cd;
  cd.m = m;
  cd.L = L;
  cd.q = h.q;
  cd.lo.resize(n);
  cd.hi.resize(n);
  cd.log_length.resize(n);
  cd.log_derivative.resize(n);
  cd.birkhoff.assign(observables.size(), std::vector<double>(n));
  for (const auto& o : observables) cd.observable_names.push_back(o.name);

  const std::size_t chunk = 1024;
  const std::size_t chunks = (n + chunk - 1) / chunk;
  const long double tlo = h.target_lo, thi = h.target_hi;
  const bool linear = h.kind == Horseshoe::Kind::linear;
  parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<std::size_t> digits(L);
    std::vector<long double> orbit(h.q * L);
    for (std::size_t w = c * chunk; w < std::min(n, (c + 1) * chunk); ++w) {
      std::size_t r = w;
      for (std::size_t i = L; i-- > 0;) {
        digits[i] = r % m;
        r /= m;
      }
      auto compose = [&](long double y, bool record) {
        for (std::size_t i = L; i-- > 0;) y = h.inverse(digits[i], y, record ? &orbit[i * h.q] : nullptr);
        return y;
      };
      const long double p = compose(tlo, false), q = compose(thi, false);
      const long double lo = std::min(p, q), hi = std::max(p, q);
      cd.lo[w] = static_cast<double>(lo);
      cd.hi[w] = static_cast<double>(hi);
      cd.log_length[w] = std::log(static_cast<double>(hi - lo));
      // Periodic point of F^L in K_w: fixed point of the contracting composite.
      long double x = 0.5L * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const long double nx = compose(x, false);
        const bool done = std::abs(nx - x) <= 1e-18L * (1 + std::abs(x));
        x = nx;
        if (done) break;
      }
      compose(x, true);
      double logd = 0;
      if (linear) {
        for (std::size_t i = 0; i < L; ++i) logd += std::log(h.branches[digits[i]].slope);
      } else {
        for (long double z : orbit) logd += std::log(static_cast<double>(2.0L * h.a * std::abs(z)));
      }
      cd.log_derivative[w] = logd;
      for (std::size_t k = 0; k < observables.size(); ++k) {
        double s = 0;
        for (long double z : orbit) s += observables[k](static_cast<double>(z));
        cd.birkhoff[k][w] = s;
      }
    }
  });
  return cd;
}

double pressure_sum(const CylinderData& cd, double sigma) {
  if (cd.L < 2) throw DomainError("pressure_sum needs depth l = L - 1 >= 1");
  std::vector<double> v(cd.words());
  for (std::size_t w = 0; w < v.size(); ++w) v[w] = sigma * cd.log_length[w];
  return log_sum_exp(v) / static_cast<double>(cd.L - 1);
}

std::optional<double> pressure_root(const CylinderData& cd, double sigma_hi) {
  double lo = 0, hi = sigma_hi;
  if (pressure_sum(cd, lo) < 0 || pressure_sum(cd, hi) > 0) return std::nullopt;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pressure_sum(cd, mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

InducedStats equilibrium_stats(const CylinderData& cd, double sigma, double s, std::size_t observable) {
  if (observable >= cd.birkhoff.size() && s != 0.0) throw DomainError("observable index out of range");
  const std::size_t n = cd.words();
  std::vector<double> logw(n);
  for (std::size_t w = 0; w < n; ++w) {
    logw[w] = sigma * cd.log_length[w];
    if (s != 0.0) logw[w] += s * cd.birkhoff[observable][w];
  }
  const double Z = log_sum_exp(logw);
  const double Ld = static_cast<double>(cd.L);
  InducedStats st;
  st.sigma = sigma;
  st.s = s;
  st.pressure = Z / Ld;
  double HL = 0, lam = 0, bk = 0;
  std::vector<double> prefix(cd.L > 1 ? n / cd.m : 0, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    const double lp = logw[w] - Z;
    const double p = std::exp(lp);
    if (p == 0) continue;
    HL -= p * lp;
    lam += p * cd.log_derivative[w];
    if (observable < cd.birkhoff.size()) bk += p * cd.birkhoff[observable][w];
    if (!prefix.empty()) prefix[w / cd.m] += p;
  }
  double HL1 = 0;
  for (double p : prefix)
    if (p > 0) HL1 -= p * std::log(p);
  st.h = std::max(0.0, HL - HL1);
  st.lambda = lam / Ld;
  st.birkhoff = bk / Ld;
  return st;
}

MeasureStats spread_to_f_invariant(const InducedStats& st, std::size_t q) {
  if (q == 0) throw DomainError("cannot spread with q = 0");
  MeasureStats m = spread_to_f_invariant(st, static_cast<double>(q));
  return m;
}

MeasureStats spread_to_f_invariant(const InducedStats& st, double mean_return_time) {
  if (!(mean_return_time > 0)) throw DomainError("mean return time must be positive");
  MeasureStats m;
  m.h = st.h / mean_return_time;
  m.lambda = st.lambda / mean_return_time;
  m.mean = st.birkhoff / mean_return_time;
  m.sigma = st.sigma;
  m.s = st.s;
  m.provenance = "equilibrium sigma=" + std::to_string(st.sigma) + " s=" + std::to_string(st.s);
  return m;
}

std::vector<PeriodicOrbit> periodic_orbits(const QuadraticMap& map, const Observable& phi, std::size_t max_period) {
  if (max_period < 1) throw DomainError("max_period must be at least 1");
  if (max_period > 30) throw DomainError("max_period above 30 is not supported");
  std::vector<PeriodicOrbit> out;
  // Lyndon words over {-, +} up to max_period (Duval's generation order):
  // one word per primitive periodic itinerary class.
  std::vector<int> w{-1};
  Itinerary signs;
  std::vector<long double> pts;
  while (!w.empty()) {
    ++w.back();
    const std::size_t p = w.size();
    signs.assign(p, 0);
    for (std::size_t i = 0; i < p; ++i) signs[i] = static_cast<std::int8_t>(w[i] ? 1 : -1);
    long double x = 0;
    bool converged = false;
    for (int it = 0; it < 500; ++it) {
      const long double nx = pull_back<long double>(map.a, x, signs);
      converged = std::abs(nx - x) <= 1e-17L;
      x = nx;
      if (converged) break;
    }
    if (converged) {
      pts.assign(p, 0);
      long double z = x;
      bool ok = true;
      double lam = 0, mean = 0;
      for (std::size_t i = 0; i < p && ok; ++i) {
        pts[i] = z;
        if (std::abs(z) > 1 || z == 0 || (z > 0) != (signs[i] > 0)) ok = false;
        lam += std::log(static_cast<double>(2.0L * map.a * std::abs(z)));
        mean += phi(static_cast<double>(z));
        z = map(z);
      }
      if (ok && std::abs(z - x) < 1e-9L && lam > 0) {
        PeriodicOrbit o;
        o.period = p;
        o.point = static_cast<double>(*std::min_element(pts.begin(), pts.end()));
        o.mean = mean / static_cast<double>(p);
        o.lambda = lam / static_cast<double>(p);
        out.push_back(o);
      }
    }
    const std::size_t m = w.size();
    while (w.size() < max_period) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == 1) w.pop_back();
  }
  return out;
}

MeasureStats point_mass_stats(const PeriodicOrbit& o) {
  MeasureStats m;
  m.h = 0;
  m.lambda = o.lambda;
  m.mean = o.mean;
  m.provenance = "periodic p=" + std::to_string(o.period) + " x=" + std::to_string(o.point);
  return m;
}

FamilyConfig FamilyConfig::defaults() {
  FamilyConfig c;
  for (int i = 0; i <= 15; ++i) c.sigma_grid.push_back(0.1 * i);
  for (int i = -12; i <= 12; ++i) c.s_grid.push_back(0.5 * i);
  return c;
}

namespace {

// Per bin of the mean, the orbit with the smallest exponent; extremes kept.
std::vector<MeasureStats> prune_orbits(const std::vector<PeriodicOrbit>& orbits, std::size_t bins) {
  if (orbits.empty()) return {};
  double lo = kInf, hi = -kInf;
  for (const auto& o : orbits) {
    lo = std::min(lo, o.mean);
    hi = std::max(hi, o.mean);
  }
  std::vector<std::optional<std::size_t>> best(bins);
  std::size_t imin = 0, imax = 0;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const auto& o = orbits[i];
    if (o.mean < orbits[imin].mean || (o.mean == orbits[imin].mean && o.lambda < orbits[imin].lambda)) imin = i;
    if (o.mean > orbits[imax].mean || (o.mean == orbits[imax].mean && o.lambda < orbits[imax].lambda)) imax = i;
    const std::size_t b = hi > lo ? std::min(bins - 1, static_cast<std::size_t>((o.mean - lo) / (hi - lo) * bins)) : 0;
    if (!best[b] || o.lambda < orbits[*best[b]].lambda) best[b] = i;
  }
  std::vector<std::size_t> keep{imin, imax};
  for (const auto& b : best)
    if (b) keep.push_back(*b);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  std::vector<MeasureStats> out;
  for (std::size_t i : keep) out.push_back(point_mass_stats(orbits[i]));
  return out;
}

}  // namespace

MeasureFamily build_family(const QuadraticMap& map, const CylinderData& cd, const Observable& phi,
                           const FamilyConfig& config, std::size_t observable) {
  if (config.sigma_grid.empty() || config.s_grid.empty()) throw DomainError("family grids must be non-empty");
  MeasureFamily fam;
  fam.q = cd.q;
  fam.observable = phi.name;
  const std::size_t ns = config.s_grid.size();
  fam.members.resize(config.sigma_grid.size() * ns);
  parallel_for(fam.members.size(), config.workers, [&](std::size_t k) {
    const double sigma = config.sigma_grid[k / ns], s = config.s_grid[k % ns];
    fam.members[k] = spread_to_f_invariant(equilibrium_stats(cd, sigma, s, observable), cd.q);
  });
  if (config.max_period > 0) fam.periodic = prune_orbits(periodic_orbits(map, phi, config.max_period), 400);
  return fam;
}

std::vector<MeasureStats> refine_members(const CylinderData& cd, const std::vector<double>& sigmas, double alpha,
                                         std::size_t q, std::size_t observable) {
  std::vector<MeasureStats> out;
  for (double sigma : sigmas) {
    auto mean_at = [&](double s) { return equilibrium_stats(cd, sigma, s, observable).birkhoff / static_cast<double>(q); };
    double lo = -1, hi = 1;
    double mlo = mean_at(lo), mhi = mean_at(hi);
    while (mlo > alpha && lo > -512) mlo = mean_at(lo *= 2);
    while (mhi < alpha && hi < 512) mhi = mean_at(hi *= 2);
    if (mlo > alpha || mhi < alpha) continue;
    // Illinois variant of regula falsi on mean(s) - alpha.
    double flo = mlo - alpha, fhi = mhi - alpha;
    int side = 0;
    double s = lo;
    for (int it = 0; it < 100; ++it) {
      s = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
      const double fs = mean_at(s) - alpha;
      if (std::abs(fs) <= 1e-10 || hi - lo < 1e-13) break;
      if ((fs < 0) == (flo < 0)) {
        lo = s;
        flo = fs;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = s;
        fhi = fs;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
    }
    auto m = spread_to_f_invariant(equilibrium_stats(cd, sigma, s, observable), q);
    m.provenance = "refined " + m.provenance;
    out.push_back(m);
  }
  return out;
}

std::optional<MeasureStats> best_witness(const std::vector<MeasureStats>& cand, double alpha, Score score,
                                         double tolerance) {
  auto value = [&](double h, double lambda) { return score == Score::ratio ? (lambda > 0 ? h / lambda : 0.0) : h - lambda; };
  std::optional<MeasureStats> best;
  double best_v = -kInf;
  for (const auto& c : cand)
    if (std::abs(c.mean - alpha) <= tolerance) {
      const double v = value(c.h, c.lambda);
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
  std::vector<std::size_t> below, above;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (cand[i].mean < alpha) below.push_back(i);
    if (cand[i].mean > alpha) above.push_back(i);
  }
  std::size_t bi = 0, bj = 0;
  double bc = -1;
  for (std::size_t i : below)
    for (std::size_t j : above) {
      const auto &x = cand[i], &y = cand[j];
      const double c = (y.mean - alpha) / (y.mean - x.mean);  // weight on x
      const double v = value(c * x.h + (1 - c) * y.h, c * x.lambda + (1 - c) * y.lambda);
      if (v > best_v) {
        best_v = v;
        bi = i;
        bj = j;
        bc = c;
      }
    }
  if (bc >= 0) {
    const auto &x = cand[bi], &y = cand[bj];
    MeasureStats m;
    m.h = bc * x.h + (1 - bc) * y.h;
    m.lambda = bc * x.lambda + (1 - bc) * y.lambda;
    m.mean = alpha;
    m.sigma = x.sigma;
    m.s = x.s;
    m.provenance = "mix " + std::to_string(bc) + " [" + x.provenance + "] + [" + y.provenance + "]";
    best = m;
  }
  return best;
}

SpectrumCurve birkhoff_spectrum(const CylinderData& cd, const MeasureFamily& fam, const SpectrumConfig& config,
                                std::vector<double> alpha_grid, std::size_t observable) {
  SpectrumCurve curve;
  curve.observable = fam.observable;
  std::vector<MeasureStats> base = fam.members;
  base.insert(base.end(), fam.periodic.begin(), fam.periodic.end());
  if (base.empty()) throw DomainError("empty measure family");
  curve.c_phi = kInf;
  curve.d_phi = -kInf;
  for (const auto& m : base) {
    curve.c_phi = std::min(curve.c_phi, m.mean);
    curve.d_phi = std::max(curve.d_phi, m.mean);
  }
  if (alpha_grid.empty()) {
    if (config.grid_points < 2) throw DomainError("spectrum grid needs at least two points");
    for (std::size_t i = 0; i < config.grid_points; ++i)
      alpha_grid.push_back(curve.c_phi + (curve.d_phi - curve.c_phi) * static_cast<double>(i) /
                                             static_cast<double>(config.grid_points - 1));
  }
  std::vector<double> sigmas = config.refine_sigmas;
  if (sigmas.empty())
    for (const auto& m : fam.members)
      if (std::find(sigmas.begin(), sigmas.end(), m.sigma) == sigmas.end()) sigmas.push_back(m.sigma);
  for (double alpha : alpha_grid) {
    std::vector<MeasureStats> cand = base;
    if (config.refine && alpha > curve.c_phi && alpha < curve.d_phi) {
      auto extra = refine_members(cd, sigmas, alpha, fam.q, observable);
      cand.insert(cand.end(), extra.begin(), extra.end());
    }
    auto w = best_witness(cand, alpha, Score::ratio, config.alpha_tolerance);
    curve.alpha.push_back(alpha);
    curve.B.push_back(w ? w->ratio() : 0.0);
    curve.witness.push_back(w);
  }
  return curve;
}

SpectrumPropertyReport spectrum_property_check(const std::vector<double>& alpha, const std::vector<double>& B,
                                               double mean, double tolerance, double max_jump) {
  SpectrumPropertyReport rep;
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) {
    const std::size_t j = i + 1;
    const double d = B[j] - B[i];
    rep.max_adjacent_jump = std::max(rep.max_adjacent_jump, std::abs(d));
    if (alpha[j] <= mean && d < -tolerance) {
      ++rep.monotone_violations;
      rep.violations.push_back("decrease on the increasing side at alpha=" + std::to_string(alpha[j]));
    }
    if (alpha[i] >= mean && d > tolerance) {
      ++rep.monotone_violations;
      rep.violations.push_back("increase on the decreasing side at alpha=" + std::to_string(alpha[j]));
    }
  }
  rep.jump_ok = rep.max_adjacent_jump <= max_jump;
  if (!rep.jump_ok) rep.violations.push_back("adjacent jump " + std::to_string(rep.max_adjacent_jump));
  return rep;
}

SpectrumPropertyReport spectrum_property_check(const SpectrumCurve& curve, double mean, double tolerance,
                                               double max_jump) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < curve.alpha.size(); ++i)
    if (curve.witness[i]) {
      a.push_back(curve.alpha[i]);
      b.push_back(curve.B[i]);
    }
  return spectrum_property_check(a, b, mean, tolerance, max_jump);
}

double CylinderMeasure::ball(double x, double r) const {
  const double a = x - r, b = x + r;
  // First interval ending at or after a.
  auto it = std::lower_bound(hi.begin(), hi.end(), a);
  double total = 0;
  for (std::size_t i = static_cast<std::size_t>(it - hi.begin()); i < lo.size() && lo[i] <= b; ++i) {
    const double len = hi[i] - lo[i];
    if (len <= 0) {
      if (lo[i] >= a && lo[i] <= b) total += mass[i];
      continue;
    }
    const double ov = std::min(hi[i], b) - std::max(lo[i], a);
    if (ov > 0) total += mass[i] * std::min(1.0, ov / len);
  }
  return total;
}

namespace {

CylinderMeasure sorted_measure(const CylinderData& cd, std::vector<double> mass) {
  std::vector<std::size_t> idx(cd.words());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return cd.lo[x] < cd.lo[y]; });
  CylinderMeasure m;
  for (std::size_t i : idx) {
    m.lo.push_back(cd.lo[i]);
    m.hi.push_back(cd.hi[i]);
    m.mass.push_back(mass[i]);
  }
  return m;
}

}  // namespace

CylinderMeasure bernoulli_measure(const CylinderData& cd, const std::vector<double>& p) {
  if (p.size() != cd.m) throw DomainError("one probability per branch required");
  double sum = 0;
  for (double x : p) {
    if (!(x >= 0)) throw DomainError("probabilities must be nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1) > 1e-12) throw DomainError("probabilities must sum to 1");
  std::vector<double> mass(cd.words());
  for (std::size_t w = 0; w < mass.size(); ++w) {
    double v = 1;
    std::size_t r = w;
    for (std::size_t i = 0; i < cd.L; ++i) {
      v *= p[r % cd.m];
      r /= cd.m;
    }
    mass[w] = v;
  }
  return sorted_measure(cd, std::move(mass));
}

CylinderMeasure equilibrium_measure(const CylinderData& cd, double sigma, double s, std::size_t observable) {
  std::vector<double> logw(cd.words());
  for (std::size_t w = 0; w < logw.size(); ++w)
    logw[w] = sigma * cd.log_length[w] + (s != 0.0 ? s * cd.birkhoff.at(observable)[w] : 0.0);
  const double Z = log_sum_exp(logw);
  for (auto& v : logw) v = std::exp(v - Z);
  return sorted_measure(cd, std::move(logw));
}

namespace {

DimensionFit fit_dimension(const std::vector<double>& radii, const std::vector<double>& logm) {
  DimensionFit f;
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (std::isfinite(logm[i])) {
      f.log_radius.push_back(std::log(radii[i]));
      f.log_mass.push_back(logm[i]);
    }
  if (f.log_radius.size() < 2) return f;
  auto lf = least_squares(f.log_radius, f.log_mass);
  f.dimension = lf.slope;
  f.r_squared = lf.r_squared;
  f.accepted = lf.r_squared >= 0.9;
  return f;
}

void check_radii(const std::vector<double>& radii) {
  if (radii.size() < 2) throw DomainError("need at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw DomainError("radii must be positive");
    if (i && !(radii[i] < radii[i - 1])) throw DomainError("radii must be decreasing");
  }
}

}  // namespace

DimensionFit local_dimension(const CylinderMeasure& m, double x, const std::vector<double>& radii) {
  check_radii(radii);
  std::vector<double> logm;
  for (double r : radii) logm.push_back(std::log(m.ball(x, r)));
  return fit_dimension(radii, logm);
}

DimensionFit local_dimension(const CylinderMeasure& m, const std::vector<double>& points,
                             const std::vector<double>& radii) {
  check_radii(radii);
  if (points.empty()) throw DomainError("need at least one point");
  std::vector<double> logm(radii.size(), 0.0);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    for (double x : points) logm[k] += std::log(m.ball(x, radii[k]));
    logm[k] /= static_cast<double>(points.size());
  }
  return fit_dimension(radii, logm);
}

std::vector<double> sample_points(const CylinderMeasure& m, std::size_t count, std::uint64_t seed) {
  std::vector<double> cum(m.mass.size());
  std::partial_sum(m.mass.begin(), m.mass.end(), cum.begin());
  if (cum.empty() || !(cum.back() > 0)) throw DomainError("measure has no mass");
  Rng rng(derive_seed(seed, 0));
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double u = uniform(rng, 0.0, cum.back());
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    i = std::min(i, cum.size() - 1);
    out.push_back(uniform(rng, m.lo[i], m.hi[i]));
  }
  return out;
}

}  // namespace bcmf
