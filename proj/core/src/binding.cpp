#include "bcmf/binding.hpp"

#include "bcmf/parallel.hpp"
#include "bcmf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace bcmf {

void BindingConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (N < 1) throw DomainError("N must be at least 1");
  if (p_max <= N) throw DomainError("p_max must exceed N");
  if (anchor_horizon < 1) throw DomainError("anchor_horizon must be at least 1");
  if (!(delta_constant > 0.0)) throw DomainError("delta_constant must be positive");
  if (!(cut_exponent >= 0.0)) throw DomainError("cut_exponent must be nonnegative");
  round_up_precision(precision_bits);
}

DeltaTable compute_delta_table(const QuadraticMap& map, const BindingConfig& config) {
  map.validate();
  config.validate();
  DeltaTable t;
  t.a = map.a;
  t.epsilon = config.epsilon;
  t.N = config.N;
  t.p_max = config.p_max;
  t.deltas = with_precision(config.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    std::vector<double> out;
    out.reserve(config.p_max);
    const Real two_a = Real(2) * Real(map.a);
    Real c(1);     // f^{i+1} 0
    Real deriv(1); // |Df^i(f0)|
    Real sum(0);
    for (std::size_t p = 1; p <= config.p_max; ++p) {
      const Real ac = rabs(c);
      if (to_double(ac) < 1e-14)
        throw DomainError("critical orbit returns to 0 at n = " + std::to_string(p) + "; delta table undefined");
      sum += deriv / ac;
      const Real d2 = rexp(Real(-config.epsilon * static_cast<double>(p))) * Real(config.delta_constant) / sum;
      out.push_back(to_double(rsqrt(d2)));
      deriv *= two_a * ac;
      c = map(c);
    }
    return out;
  });
  return t;
}

std::optional<std::size_t> bound_period(double x, const DeltaTable& table) {
  const double ax = std::abs(x);
  if (ax >= table.delta(table.N) || ax < table.delta(table.p_max)) return std::nullopt;
  // deltas are decreasing: first p > N with delta_p <= |x|.
  for (std::size_t p = table.N + 1; p <= table.p_max; ++p)
    if (table.delta(p) <= ax) return p;
  return std::nullopt;
}

std::size_t LemmaPReport::total_violations() const {
  std::size_t v = 0;
  for (const auto& r : rows) v += r.expansion_violations + r.lower_violations + r.upper_violations;
  return v;
}

LemmaPReport verify_lemma_P(const QuadraticMap& map, const DeltaTable& table, double lambda, std::size_t p_lo,
                            std::size_t p_hi, std::size_t sample_count, std::uint64_t seed, unsigned workers) {
  map.validate();
  if (p_lo < 2 || p_hi > table.p_max || p_lo > p_hi)
    throw DomainError("lemma check needs 2 <= p_lo <= p_hi <= p_max");
  if (sample_count == 0) throw DomainError("sample_count must be positive");
  LemmaPReport report;
  report.rows.resize(p_hi - p_lo + 1);
  const double log5 = std::log(5.0);
  parallel_for(report.rows.size(), workers, [&](std::size_t idx) {
    const std::size_t p = p_lo + idx;
    LemmaPRow row;
    row.p = p;
    row.samples = sample_count;
    row.min_expansion_margin = row.min_lower_margin = row.min_upper_margin = std::numeric_limits<double>::infinity();
    Rng rng(derive_seed(seed, p));
    const double lo = table.delta(p), hi = table.delta(p - 1);
    for (std::size_t s = 0; s < sample_count; ++s) {
      const double x = uniform(rng, lo, hi);
      const double log_df = with_precision(map.precision_bits, [&](auto tag) {
        using Real = decltype(tag);
        Real y(x), prod(1);
        const Real two_a = Real(2) * Real(map.a);
        for (std::size_t i = 0; i < p; ++i) {
          prod *= two_a * rabs(y);
          y = map(y);
        }
        return to_double(rlog(prod));
      });
      const double e = log_df / static_cast<double>(p) - lambda / 3.0;
      const double lx = -2.0 * std::log(x);
      const double lower = static_cast<double>(p) - lx / log5;
      const double upper = lx / lambda - static_cast<double>(p);
      row.min_expansion_margin = std::min(row.min_expansion_margin, e);
      row.min_lower_margin = std::min(row.min_lower_margin, lower);
      row.min_upper_margin = std::min(row.min_upper_margin, upper);
      row.expansion_violations += e < 0;
      row.lower_violations += lower < 0;
      row.upper_violations += upper < 0;
    }
    report.rows[idx] = row;
  });
  return report;
}

namespace {

void record_pair(OutsideExpansionReport& r, double x, std::size_t n, double log_df, double log_y, double delta_hat,
                 double lambda) {
  const double nn = static_cast<double>(n);
  const double m = log_df / nn - lambda / 3.0 - std::log(delta_hat) / nn;
  ++r.pairs;
  if (m < 0) ++r.violations;
  if (m < r.min_margin) {
    r.min_margin = m;
    r.worst = ExpansionSample{x, n};
  }
  if (log_y < std::log(delta_hat)) {
    const double rm = log_df / nn - lambda / 3.0;
    ++r.return_pairs;
    if (rm < 0) ++r.return_violations;
    r.min_return_margin = std::min(r.min_return_margin, rm);
  }
}

}  // namespace

OutsideExpansionReport verify_outside_expansion(const QuadraticMap& map, double delta_hat, double lambda,
                                                const std::vector<ExpansionSample>& samples) {
  map.validate();
  if (!(delta_hat > 0.0)) throw DomainError("delta_hat must be positive");
  OutsideExpansionReport r;
  for (const auto& s : samples) {
    if (s.n == 0) continue;
    double y = s.x, log_df = 0.0;
    bool outside = true;
    for (std::size_t i = 0; i < s.n; ++i) {
      if (std::abs(y) < delta_hat) {
        outside = false;
        break;
      }
      log_df += std::log(2.0 * map.a * std::abs(y));
      y = map(y);
    }
    if (outside) record_pair(r, s.x, s.n, log_df, std::log(std::abs(y)), delta_hat, lambda);
  }
  return r;
}

OutsideExpansionReport verify_outside_expansion(const QuadraticMap& map, double delta_hat, double lambda,
                                                std::size_t sample_count, std::size_t max_n, std::uint64_t seed) {
  map.validate();
  if (!(delta_hat > 0.0)) throw DomainError("delta_hat must be positive");
  OutsideExpansionReport r;
  Rng rng(derive_seed(seed, 0));
  for (std::size_t s = 0; s < sample_count; ++s) {
    const double x = uniform(rng, -1.0, 1.0);
    double y = x, log_df = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
      if (std::abs(y) < delta_hat) break;
      log_df += std::log(2.0 * map.a * std::abs(y));
      y = map(y);
      record_pair(r, x, n, log_df, std::log(std::abs(y)), delta_hat, lambda);
    }
  }
  return r;
}

namespace {

template <class Real>
struct Lap {
  Real lo, hi;          // domain inside the cell
  Real img_lo, img_hi;  // f^k(lo), f^k(hi)
  Itinerary signs;      // sign of f^i on the lap, i < k
};

// log-scale recurrence margin of the orbit chain[0..k], continued by x_hat.
template <class Real>
double chain_margin(const std::vector<Real>& chain, double x_hat, double delta_N, const BindingConfig& config) {
  const auto n0 = static_cast<std::size_t>(std::ceil(1.0 / config.epsilon));
  const std::size_t k = chain.size() - 1;
  const double log_dn = std::log(delta_N);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t n = n0; n <= std::min(k, config.anchor_horizon); ++n) {
    const double y = std::abs(to_double(chain[n]));
    m = std::min(m, (y > 0 ? std::log(y) : kNegInf) - log_dn + config.epsilon * static_cast<double>(n));
  }
  // After time k the orbit sits at x_hat; the constraint is tightest at the first such n.
  const std::size_t first = std::max(n0, k + 1);
  if (first <= config.anchor_horizon)
    m = std::min(m, std::log(x_hat) - log_dn + config.epsilon * static_cast<double>(first));
  return m;
}

template <class Real>
Anchor find_anchor_impl(const QuadraticMap& map, const RawCell& cell, double delta_N, const BindingConfig& config) {
  const Real x_hat = orientation_reversing_fixed_point<Real>(map.a);
  const double x_hat_d = to_double(x_hat);
  std::deque<Lap<Real>> queue;
  queue.push_back({Real(cell.lo), Real(cell.hi), Real(cell.lo), Real(cell.hi), {}});
  std::size_t processed = 0;
  std::optional<Anchor> best;
  std::size_t best_depth = 0;
  const Real mid = (Real(cell.lo) + Real(cell.hi)) / 2;
  Real best_dist(0);

  while (!queue.empty() && processed < config.anchor_lap_budget) {
    Lap<Real> lap = std::move(queue.front());
    queue.pop_front();
    ++processed;
    const std::size_t depth = lap.signs.size();
    if (best && depth > best_depth) break;  // BFS: minimal depth found
    if (depth > config.anchor_horizon) continue;
    const Real u = std::min(lap.img_lo, lap.img_hi), v = std::max(lap.img_lo, lap.img_hi);
    for (int ts : {1, -1}) {
      const Real t = ts > 0 ? x_hat : Real(-x_hat);
      if (!(u < t && t < v)) continue;
      auto chain = pull_back_orbit<Real>(map.a, t, lap.signs);
      if (chain[0] < Real(cell.lo) || chain[0] >= Real(cell.hi)) continue;
      const double margin = chain_margin(chain, x_hat_d, delta_N, config);
      if (margin < 0) continue;
      const Real dist = rabs(chain[0] - mid);
      if (!best || dist < best_dist) {
        best = Anchor{to_double(chain[0]), lap.signs, ts, margin};
        best_depth = depth;
        best_dist = dist;
      }
    }
    if (best) continue;

    // Advance one step, splitting at the preimage of 0 if the image straddles it.
    auto push_child = [&](Real lo, Real hi, Real ilo, Real ihi, const Itinerary& signs) {
      const int s = (ilo + ihi) > 0 ? 1 : -1;
      Lap<Real> child{lo, hi, map(ilo), map(ihi), signs};
      child.signs.push_back(static_cast<std::int8_t>(s));
      queue.push_back(std::move(child));
    };
    if (u < 0 && v > 0) {
      const Real xs = pull_back<Real>(map.a, Real(0), lap.signs);
      push_child(lap.lo, xs, lap.img_lo, Real(0), lap.signs);
      push_child(xs, lap.hi, Real(0), lap.img_hi, lap.signs);
    } else {
      push_child(lap.lo, lap.hi, lap.img_lo, lap.img_hi, lap.signs);
    }
  }
  if (!best)
    throw DomainError("anchor search failed for cell (p=" + std::to_string(cell.p) + ", j=" + std::to_string(cell.j) +
                      ") after " + std::to_string(processed) + " laps; check epsilon, N and the horizon");
  return *best;
}

}  // namespace

Anchor find_anchor(const QuadraticMap& map, const RawCell& cell, double delta_N, const BindingConfig& config) {
  return with_precision(config.precision_bits,
                        [&](auto tag) { return find_anchor_impl<decltype(tag)>(map, cell, delta_N, config); });
}

double anchor_recurrence_margin(double a, const Anchor& anchor, double delta_N, const BindingConfig& config,
                                int bits) {
  return with_precision(std::min(bits, 256), [&](auto tag) {
    using Real = decltype(tag);
    const Real x_hat = orientation_reversing_fixed_point<Real>(a);
    const Real t = anchor.target_sign > 0 ? x_hat : Real(-x_hat);
    auto chain = pull_back_orbit<Real>(a, t, anchor.itinerary);
    // The chain must follow its itinerary forward as well.
    QuadraticMap f(a);
    for (std::size_t i = 0; i < anchor.itinerary.size(); ++i) {
      const int s = chain[i] > 0 ? 1 : -1;
      if (s != anchor.itinerary[i]) return kNegInf;
      if (to_double(rabs(f(chain[i]) - chain[i + 1])) > 1e-12) return kNegInf;
    }
    return chain_margin(chain, to_double(x_hat), delta_N, config);
  });
}

std::optional<std::size_t> CriticalPartition::element_of(double x) const {
  const double ax = std::abs(x);
  if (ax > delta || ax < deep_cutoff) return std::nullopt;
  // elements run right to left with decreasing lo.
  auto it = std::partition_point(elements.begin(), elements.end(),
                                 [&](const PartitionElement& e) { return e.lo > ax; });
  if (it == elements.end()) return elements.size() - 1;
  return static_cast<std::size_t>(it - elements.begin());
}

CriticalPartition build_critical_partition(const QuadraticMap& map, const BindingConfig& config, unsigned workers) {
  map.validate();
  config.validate();
  CriticalPartition part;
  part.a = map.a;
  part.config = config;
  part.table = compute_delta_table(map, config);
  const auto& t = part.table;
  const double delta_N = t.delta(config.N);
  const double x_hat = fixed_points(map).x_hat;
  if (delta_N >= x_hat) throw DomainError("delta_N must lie below the fixed point x_hat; increase N");

  for (std::size_t p = config.N + 1; p <= config.p_max; ++p) {
    const auto count = static_cast<std::size_t>(
        std::max(1.0, std::floor(std::exp(config.cut_exponent * config.epsilon * static_cast<double>(p)))));
    const double top = t.delta(p - 1), bottom = t.delta(p), w = (top - bottom) / static_cast<double>(count);
    for (std::size_t j = 1; j <= count; ++j) {
      const double hi = top - static_cast<double>(j - 1) * w;
      const double lo = j == count ? bottom : hi - w;
      part.cells.push_back({p, j, lo, hi});
    }
  }
  if (part.cells.size() < 3) throw DomainError("critical partition needs at least three raw cells; raise p_max");

  part.anchors.resize(part.cells.size());
  parallel_for(part.cells.size(), workers,
               [&](std::size_t k) { part.anchors[k] = find_anchor(map, part.cells[k], delta_N, config); });

  const int check_bits = std::min(2 * round_up_precision(config.precision_bits), 256);
  for (std::size_t k = 0; k < part.anchors.size(); ++k) {
    const double m = anchor_recurrence_margin(map.a, part.anchors[k], delta_N, config, check_bits);
    if (m < 0)
      throw DomainError("anchor for cell (p=" + std::to_string(part.cells[k].p) + ", j=" +
                        std::to_string(part.cells[k].j) + ") fails re-verification at " +
                        std::to_string(check_bits) + " bits");
  }
  part.reverified = true;

  // Element [a_{k+2}, a_k] contains exactly the raw cell k+1.
  for (std::size_t k = 0; k + 2 < part.anchors.size(); k += 2) {
    const auto& c = part.cells[k + 1];
    part.elements.push_back({c.p, c.j, part.anchors[k + 2].x, part.anchors[k].x, k + 2, k});
  }
  part.delta = part.anchors[0].x;
  part.deep_cutoff = part.elements.back().lo;
  part.lambda_lo = part.elements.front().lo;
  part.lambda_hi = part.elements.front().hi;
  return part;
}

}  // namespace bcmf
