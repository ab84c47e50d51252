#include "bcmf/inducing.hpp"

#include <algorithm>
#include <cmath>

namespace bcmf {

void InducingConfig::validate() const {
  if (T_max < 1) throw DomainError("T_max must be at least 1");
  if (!(min_mass >= 0.0)) throw DomainError("min_mass must be nonnegative");
  if (max_steps < 1) throw DomainError("max_steps must be at least 1");
  round_up_precision(precision_bits);
}

double InducedSystem::coverage() const {
  double s = 0.0;
  for (const auto& b : branches) s += b.length;
  return lambda_measure > 0 ? s / lambda_measure : 0.0;
}

std::optional<std::size_t> InducedSystem::branch_of(double x) const {
  auto it = std::upper_bound(branches.begin(), branches.end(), x,
                             [](double v, const InducedBranch& b) { return v < b.lo; });
  if (it == branches.begin()) return std::nullopt;
  --it;
  if (x > it->hi) return std::nullopt;
  return static_cast<std::size_t>(it - branches.begin());
}

namespace {

// An interval of the dynamical partition at time t: image [ya, yb] (ya < yb)
// with f^t(xa) = ya, f^t(xb) = yb.
template <class Real>
struct Piece {
  Real ya, yb;
  Real xa, xb;
  Itinerary signs;
  std::size_t free_at = 0;
  std::vector<std::uint32_t> anc;
};

template <class Real>
class Builder {
 public:
  Builder(const QuadraticMap& map, const CriticalPartition& part, const InducingConfig& cfg, InducedSystem& out)
      : map_(map), cfg_(cfg), out_(out) {
    // Element boundaries b_0 = delta > b_1 > ... > b_m = deep cutoff.
    bounds_.push_back(anchor_point<Real>(map.a, part.anchors[part.elements.front().hi_anchor]));
    for (const auto& e : part.elements) {
      bounds_.push_back(anchor_point<Real>(map.a, part.anchors[e.lo_anchor]));
      labels_.push_back(e.p);
    }
    delta_ = bounds_.front();
    deep_ = bounds_.back();
    lam_lo_ = bounds_[1];
    lam_hi_ = bounds_[0];
    L_ = lam_hi_ - lam_lo_;
  }

  Real lambda_lo() const { return lam_lo_; }
  Real lambda_hi() const { return lam_hi_; }

  void run() {
    auto snaps = cfg_.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    out_.snapshots.resize(snaps.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) out_.snapshots[i].time = snaps[i];
    const Real min_mass = Real(cfg_.min_mass) * L_;

    // Depth-first over (interval, time); memory stays proportional to the depth.
    std::vector<std::pair<Piece<Real>, std::size_t>> stack;
    stack.push_back({{lam_lo_, lam_hi_, lam_lo_, lam_hi_, {}, labels_.front(), {}}, 0});
    std::vector<Piece<Real>> children;
    while (!stack.empty()) {
      auto [p, t] = std::move(stack.back());
      stack.pop_back();
      if (++steps_ > cfg_.max_steps) {
        budget_exhausted_ = true;
        unreturned_ += mass(p);
        for (const auto& [q, tq] : stack) unreturned_ += mass(q);
        break;
      }
      children.clear();
      process(std::move(p), t, children);
      for (auto it = children.rbegin(); it != children.rend(); ++it) {
        auto& c = *it;
        auto sit = std::lower_bound(snaps.begin(), snaps.end(), t);
        if (sit != snaps.end() && *sit == t) {
          auto& snap = out_.snapshots[static_cast<std::size_t>(sit - snaps.begin())];
          c.anc.push_back(static_cast<std::uint32_t>(snap.lengths.size()));
          snap.lengths.push_back(to_double(mass(c)));
        }
        const Real m = mass(c);
        if (t == cfg_.T_max) {
          unreturned_ += m;
        } else if (m < min_mass || m == 0) {
          pruned_ += m;
        } else {
          advance(c);
          stack.push_back({std::move(c), t + 1});
        }
      }
    }
  }

  Real deep_loss_ = 0, unreturned_ = 0, pruned_ = 0;
  std::size_t breakdowns_ = 0, steps_ = 0;
  bool budget_exhausted_ = false;
  std::vector<InducedBranch> branches_;

 private:
  const QuadraticMap& map_;
  const InducingConfig& cfg_;
  InducedSystem& out_;
  std::vector<Real> bounds_;
  std::vector<std::size_t> labels_;  // labels_[i] = p of element [b_{i+1}, b_i]
  Real delta_, deep_, lam_lo_, lam_hi_, L_;

  static Real mass(const Piece<Real>& p) { return rabs(p.xb - p.xa); }

  void advance(Piece<Real>& p) const {
    const int s = (p.ya + p.yb) > 0 ? 1 : -1;
    Real fa = map_(p.ya), fb = map_(p.yb);
    p.signs.push_back(static_cast<std::int8_t>(s));
    if (s > 0) {  // f decreasing on the positive side
      std::swap(fa, fb);
      std::swap(p.xa, p.xb);
    }
    p.ya = fa;
    p.yb = fb;
  }

  // Cuts p at the ascending image points ys (strictly inside), returning the pieces in order.
  std::vector<Piece<Real>> cut(const Piece<Real>& p, const std::vector<Real>& ys) const {
    std::vector<Piece<Real>> out;
    Real prev_y = p.ya, prev_x = p.xa;
    const bool up = p.xb > p.xa;
    for (const auto& y : ys) {
      Real x = pull_back<Real>(map_.a, y, p.signs);
      // Slivers below working precision come out with zero width and are pruned.
      if (up ? x < prev_x : x > prev_x) x = prev_x;
      if (up ? x > p.xb : x < p.xb) x = p.xb;
      out.push_back({prev_y, y, prev_x, x, p.signs, p.free_at, p.anc});
      prev_y = y;
      prev_x = x;
    }
    out.push_back({prev_y, p.yb, prev_x, p.xb, p.signs, p.free_at, p.anc});
    return out;
  }

  static Piece<Real> merge(const Piece<Real>& lo, const Piece<Real>& hi) {
    Piece<Real> m = lo;
    m.yb = hi.yb;
    m.xb = hi.xb;
    return m;
  }

  void emit(const Piece<Real>& p, int target, std::size_t t, const Real& full_lo, const Real& full_hi) {
    InducedBranch b;
    const Real lo = std::min(p.xa, p.xb), hi = std::max(p.xa, p.xb);
    b.lo = to_double(lo);
    b.hi = to_double(hi);
    b.length = to_double(hi - lo);
    b.R = t;
    b.domain_sign = 1;
    b.target_sign = target;
    b.itinerary = p.signs;
    b.snapshot_ids = p.anc;
    const Real tlo = target > 0 ? lam_lo_ : Real(-lam_hi_), thi = target > 0 ? lam_hi_ : Real(-lam_lo_);
    b.xi = to_double(std::min(tlo - full_lo, full_hi - thi) / L_);
    branches_.push_back(std::move(b));
  }

  void process(Piece<Real>&& p, std::size_t t, std::vector<Piece<Real>>& out) {
    if (t == 0) {
      out.push_back(std::move(p));
      return;
    }
    if (t < p.free_at) {  // bound
      if (p.ya < 0 && p.yb > 0) {
        ++breakdowns_;
        for (auto& q : cut(p, {Real(0)})) out.push_back(std::move(q));
      } else {
        out.push_back(std::move(p));
      }
      return;
    }

    // Returns: the free image covers 3 Lambda^+ or 3 Lambda^-.
    const Real c = (lam_lo_ + lam_hi_) / 2, h3 = Real(3) * L_ / 2;
    std::vector<Real> cuts;
    if (p.ya <= -c - h3 && p.yb >= -c + h3) {
      cuts.push_back(-lam_hi_);
      cuts.push_back(-lam_lo_);
    }
    if (p.ya <= c - h3 && p.yb >= c + h3) {
      cuts.push_back(lam_lo_);
      cuts.push_back(lam_hi_);
    }
    if (cuts.empty()) {
      subdivide(std::move(p), t, out);
      return;
    }
    const Real full_lo = p.ya, full_hi = p.yb;
    for (auto& q : cut(p, cuts)) {
      const bool neg = q.ya == -lam_hi_ && q.yb == -lam_lo_;
      const bool pos = q.ya == lam_lo_ && q.yb == lam_hi_;
      if (neg || pos)
        emit(q, pos ? 1 : -1, t, full_lo, full_hi);
      else
        subdivide(std::move(q), t, out);
    }
  }

  // Smallest label among elements meeting the open interval (alo, ahi) of |y|.
  std::optional<std::size_t> min_label(const Real& alo, const Real& ahi) const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (bounds_[i + 1] < ahi && bounds_[i] > alo) best = best ? std::min(*best, labels_[i]) : labels_[i];
    return best;
  }

  std::size_t full_count(const Real& alo, const Real& ahi) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) n += (bounds_[i + 1] >= alo && bounds_[i] <= ahi);
    return n;
  }

  void keep(Piece<Real>&& p, std::size_t t, std::vector<Piece<Real>>& out) const {
    const Real alo = p.ya > 0 ? p.ya : Real(-p.yb), ahi = p.ya > 0 ? p.yb : Real(-p.ya);
    if (alo < delta_)
      if (auto lab = min_label(alo, ahi)) p.free_at = t + *lab;
    out.push_back(std::move(p));
  }

  void subdivide(Piece<Real>&& p, std::size_t t, std::vector<Piece<Real>>& out) {
    const bool crosses = p.ya < 0 && p.yb > 0;
    const Real dist = crosses ? Real(0) : std::min(rabs(p.ya), rabs(p.yb));
    if (dist >= delta_) {
      out.push_back(std::move(p));
      return;
    }
    // Remove the part below the last partition point.
    std::vector<Piece<Real>> sides;
    {
      std::vector<Real> ys;
      if (p.ya < -deep_ && -deep_ < p.yb) ys.push_back(-deep_);
      if (p.ya < deep_ && deep_ < p.yb) ys.push_back(deep_);
      for (auto& q : ys.empty() ? std::vector<Piece<Real>>{p} : cut(p, ys)) {
        if (q.ya >= -deep_ && q.yb <= deep_)
          deep_loss_ += mass(q);
        else
          sides.push_back(std::move(q));
      }
    }
    std::size_t total_full = 0;
    for (const auto& s : sides) {
      const Real alo = s.ya > 0 ? s.ya : Real(-s.yb), ahi = s.ya > 0 ? s.yb : Real(-s.ya);
      total_full += full_count(alo, ahi);
    }
    const bool split = crosses || total_full > 2;
    for (auto& s : sides) {
      if (!split)
        keep(std::move(s), t, out);
      else
        subdivide_side(std::move(s), t, out);
    }
  }

  void subdivide_side(Piece<Real>&& s, std::size_t t, std::vector<Piece<Real>>& out) {
    const int sign = s.ya > 0 ? 1 : -1;
    const Real alo = sign > 0 ? s.ya : Real(-s.yb), ahi = sign > 0 ? s.yb : Real(-s.ya);
    if (full_count(alo, ahi) == 0) {
      keep(std::move(s), t, out);
      return;
    }
    std::vector<Real> abs_cuts;  // ascending in |y|
    for (std::size_t i = bounds_.size(); i-- > 0;)
      if (alo < bounds_[i] && bounds_[i] < ahi) abs_cuts.push_back(bounds_[i]);
    std::vector<Real> ys;
    if (sign > 0)
      ys = abs_cuts;
    else
      for (auto it = abs_cuts.rbegin(); it != abs_cuts.rend(); ++it) ys.push_back(-*it);
    auto pieces = cut(s, ys);
    if (sign < 0) std::reverse(pieces.begin(), pieces.end());  // ascending in |y|

    // Classify in |y|: outer (>= delta) or inside element i, full or partial.
    struct Info {
      bool outer = false, full = false;
      std::size_t elem = 0;
    };
    std::vector<Info> info(pieces.size());
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const Real l = sign > 0 ? pieces[k].ya : Real(-pieces[k].yb);
      const Real h = sign > 0 ? pieces[k].yb : Real(-pieces[k].ya);
      if (l >= delta_) {
        info[k].outer = true;
        continue;
      }
      std::size_t i = 0;
      while (i + 1 < bounds_.size() && bounds_[i + 1] > l) ++i;
      info[k].elem = i;
      info[k].full = (l == bounds_[i + 1] && h == bounds_[i]);
    }

    // Groups of consecutive pieces, each holding exactly one full element:
    // partial pieces join the nearest full one, a short outer piece joins the
    // group next to it.
    std::vector<std::size_t> full;
    for (std::size_t k = 0; k < pieces.size(); ++k)
      if (info[k].full) full.push_back(k);
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [first, last]
    std::vector<bool> group_outer;
    for (std::size_t f : full) {
      groups.push_back({f, f});
      group_outer.push_back(false);
    }
    groups.front().first = 0;
    std::size_t top = pieces.size() - 1;
    if (info[top].outer) {
      const Real len = pieces[top].yb - pieces[top].ya;
      groups.back().second = top - 1;
      if (len >= L_) {
        groups.push_back({top, top});
        group_outer.push_back(true);
      } else {
        groups.back().second = top;
      }
    } else {
      groups.back().second = top;
    }

    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto [first, last] = groups[g];
      Piece<Real> q = pieces[first];
      for (std::size_t k = first + 1; k <= last; ++k) q = sign > 0 ? merge(q, pieces[k]) : merge(pieces[k], q);
      if (group_outer[g]) {
        out.push_back(std::move(q));  // free
        continue;
      }
      std::size_t label = 0;
      for (std::size_t k = first; k <= last; ++k)
        if (info[k].full) label = labels_[info[k].elem];
      if (label == 0) {
        keep(std::move(q), t, out);
        continue;
      }
      q.free_at = t + label;
      out.push_back(std::move(q));
    }
  }
};

}  // namespace

InducedSystem build_induced_map(const QuadraticMap& map, const CriticalPartition& partition,
                                const InducingConfig& config) {
  map.validate();
  config.validate();
  if (partition.elements.empty()) throw DomainError("critical partition has no elements");
  if (!(partition.lambda_lo > 0.0 && partition.lambda_hi < partition.table.delta(partition.config.N)))
    throw DomainError("Lambda^+ must lie inside (0, delta_N)");
  if (config.T_max < partition.config.N) throw DomainError("T_max must be at least N");
  InducedSystem sys;
  sys.a = map.a;
  sys.epsilon = partition.config.epsilon;
  sys.T_max = config.T_max;
  sys.delta = partition.delta;

  with_precision(config.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    Builder<Real> b(map, partition, config, sys);
    b.run();
    sys.lambda_lo = to_double(b.lambda_lo());
    sys.lambda_hi = to_double(b.lambda_hi());
    sys.lambda_measure = 2.0 * to_double(b.lambda_hi() - b.lambda_lo());
    sys.deep_loss = 2.0 * to_double(b.deep_loss_);
    sys.unreturned = 2.0 * to_double(b.unreturned_);
    sys.pruned = 2.0 * to_double(b.pruned_);
    sys.steps = b.steps_;
    sys.budget_exhausted = b.budget_exhausted_;
    sys.binding_breakdowns = 2 * b.breakdowns_;
    sys.branches = std::move(b.branches_);
  });

  // Mirror image on Lambda^-: f(-x) = f(x).
  const std::size_t n_pos = sys.branches.size();
  sys.branches.reserve(2 * n_pos);
  for (std::size_t i = 0; i < n_pos; ++i) {
    InducedBranch m = sys.branches[i];
    std::swap(m.lo, m.hi);
    m.lo = -m.lo;
    m.hi = -m.hi;
    m.domain_sign = -1;
    if (!m.itinerary.empty()) m.itinerary[0] = static_cast<std::int8_t>(-m.itinerary[0]);
    sys.branches.push_back(std::move(m));
  }
  std::sort(sys.branches.begin(), sys.branches.end(),
            [](const InducedBranch& x, const InducedBranch& y) { return x.lo < y.lo; });

  std::vector<double> returned(config.T_max + 1, 0.0);
  for (const auto& b : sys.branches) returned[b.R] += b.length;
  sys.tail.resize(config.T_max + 1);
  double acc = 0.0;
  for (std::size_t n = 0; n <= config.T_max; ++n) {
    acc += returned[n];
    sys.tail[n] = std::max(0.0, sys.lambda_measure - acc);
  }
  return sys;
}

TailFit return_time_tail(std::span<const double> tail) {
  TailFit fit;
  std::vector<double> ns, logs;
  for (std::size_t n = 0; n < tail.size(); ++n)
    if (tail[n] > 0) {
      ns.push_back(static_cast<double>(n));
      logs.push_back(std::log(tail[n]));
    }
  if (ns.size() < 10) {
    fit.note = "fewer than 10 positive tail entries";
    return fit;
  }
  // Skip the initial plateau before the first return.
  std::size_t start = 0;
  while (start + 1 < logs.size() && logs[start + 1] == logs[0]) ++start;
  struct Window {
    LinearFit lf;
    std::size_t s, e;
  };
  std::optional<Window> strict, loose, best;
  for (std::size_t s = start; s < ns.size(); ++s)
    for (std::size_t e = s + 9; e < ns.size(); ++e) {
      const std::size_t len = e - s + 1;
      auto lf = least_squares(std::span(ns).subspan(s, len), std::span(logs).subspan(s, len));
      Window w{lf, s, e};
      auto longer = [&](const std::optional<Window>& o) { return !o || len > o->e - o->s + 1; };
      if (lf.slope < 0 && lf.r_squared >= 0.99 && longer(strict)) strict = w;
      if (lf.slope < 0 && lf.r_squared >= 0.9 && longer(loose)) loose = w;
      if (!best || lf.r_squared > best->lf.r_squared) best = w;
    }
  if (!best) {
    fit.note = "tail window too short after the initial plateau";
    return fit;
  }
  const Window& w = strict ? *strict : loose ? *loose : *best;
  fit.slope = w.lf.slope;
  fit.zeta = std::exp(w.lf.slope);
  fit.C1 = std::exp(w.lf.intercept) / tail[0];
  fit.r_squared = w.lf.r_squared;
  fit.first_n = static_cast<std::size_t>(ns[w.s]);
  fit.last_n = static_cast<std::size_t>(ns[w.e]);
  fit.accepted = w.lf.slope < 0 && w.lf.r_squared >= 0.9;
  if (!fit.accepted) fit.note = w.lf.slope >= 0 ? "non-negative slope" : "fit rejected: R^2 < 0.9";
  return fit;
}

TailFit return_time_tail(const InducedSystem& system) { return return_time_tail(std::span(system.tail)); }

TowerPoint tower_step(const QuadraticMap& map, const InducedSystem& system, TowerPoint p) {
  auto idx = system.branch_of(p.x);
  if (!idx) throw DomainError("point lies in the tail set (no branch)");
  const auto& b = system.branches[*idx];
  if (p.level >= b.R) throw DomainError("level exceeds the return time at this point");
  if (p.level + 1 < b.R) return {p.x, p.level + 1};
  // Image point: pull the relative position back through the branch at high precision.
  return with_precision(113, [&](auto tag) {
    using Real = decltype(tag);
    const Real tlo = b.target_sign > 0 ? Real(system.lambda_lo) : Real(-system.lambda_hi);
    const Real thi = b.target_sign > 0 ? Real(system.lambda_hi) : Real(-system.lambda_lo);
    // Locate x in the branch by bisection on the target coordinate.
    const Real xlo = pull_back<Real>(map.a, tlo, b.itinerary), xhi = pull_back<Real>(map.a, thi, b.itinerary);
    const bool increasing = xlo < xhi;
    Real ylo = tlo, yhi = thi;
    const Real x(p.x);
    for (int it = 0; it < 200; ++it) {
      const Real ym = (ylo + yhi) / 2;
      const Real xm = pull_back<Real>(map.a, ym, b.itinerary);
      if ((xm < x) == increasing)
        ylo = ym;
      else
        yhi = ym;
      if (yhi - ylo < Real(1e-30)) break;
    }
    return TowerPoint{to_double((ylo + yhi) / 2), 0};
  });
}

std::size_t QuickReturnReport::total_violations() const {
  std::size_t v = 0;
  for (const auto& r : rows) v += r.violations;
  return v;
}

QuickReturnReport quick_return_check(const InducedSystem& system, double lambda) {
  QuickReturnReport rep;
  const double eps = system.epsilon;
  const std::size_t horizon = system.T_max;
  for (std::size_t si = 0; si < system.snapshots.size(); ++si) {
    const auto& snap = system.snapshots[si];
    QuickReturnRow row;
    row.k = snap.time;
    row.elements = snap.lengths.size();
    row.window_hi = (1.0 + 19.0 * eps / lambda) * static_cast<double>(snap.time);
    row.window_truncated = row.window_hi > static_cast<double>(horizon);
    std::vector<double> best(snap.lengths.size(), 0.0);
    for (const auto& b : system.branches) {
      if (b.domain_sign < 0 || b.snapshot_ids.size() <= si) continue;
      if (b.R <= snap.time || static_cast<double>(b.R) > row.window_hi) continue;
      auto& v = best[b.snapshot_ids[si]];
      v = std::max(v, b.length);
    }
    row.min_log_ratio_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < best.size(); ++i) {
      const double m = best[i] > 0 ? std::log(best[i] / snap.lengths[i]) + std::sqrt(eps) * static_cast<double>(snap.time)
                                   : kNegInf;
      row.min_log_ratio_margin = std::min(row.min_log_ratio_margin, m);
      row.violations += m < 0;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

DistortionReport distortion_check(InducedSystem& system, std::size_t samples_per_branch, int precision_bits) {
  DistortionReport rep;
  if (samples_per_branch < 2) throw DomainError("need at least two samples per branch");
  with_precision(precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    const Real two_a = Real(2) * Real(system.a);
    for (auto& b : system.branches) {
      const Real tlo = b.target_sign > 0 ? Real(system.lambda_lo) : Real(-system.lambda_hi);
      const Real len = Real(system.lambda_hi - system.lambda_lo);
      double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
      for (std::size_t s = 0; s < samples_per_branch; ++s) {
        const Real y = tlo + len * Real(static_cast<double>(s) / static_cast<double>(samples_per_branch - 1));
        auto chain = pull_back_orbit<Real>(system.a, y, b.itinerary);
        Real prod(1);
        for (std::size_t i = 0; i < b.R; ++i) prod *= two_a * rabs(chain[i]);
        const double l = to_double(rlog(prod));
        lmin = std::min(lmin, l);
        lmax = std::max(lmax, l);
      }
      b.distortion_sample = std::exp(lmax - lmin);
      ++rep.branches;
      rep.max_ratio = std::max(rep.max_ratio, b.distortion_sample);
      const double kb = koebe_bound(b.xi);
      rep.max_ratio_over_koebe = std::max(rep.max_ratio_over_koebe, b.distortion_sample / kb);
      rep.koebe_violations += b.distortion_sample > kb;
    }
  });
  return rep;
}

MarkovReport markov_check(const InducedSystem& system, int precision_bits) {
  MarkovReport rep;
  const QuadraticMap f(system.a);
  with_precision(precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    const Real L = Real(system.lambda_hi) - Real(system.lambda_lo);
    for (const auto& b : system.branches) {
      ++rep.branches;
      const Real tlo = b.target_sign > 0 ? Real(system.lambda_lo) : Real(-system.lambda_hi);
      const Real thi = b.target_sign > 0 ? Real(system.lambda_hi) : Real(-system.lambda_lo);
      for (const Real& target : {tlo, thi}) {
        Real x = pull_back<Real>(system.a, target, b.itinerary);
        if ((x > 0 ? 1 : -1) != b.domain_sign) ++rep.sign_violations;
        for (std::size_t i = 0; i < b.R; ++i) {
          if ((x > 0 ? 1 : -1) != b.itinerary[i]) ++rep.sign_violations;
          x = f(x);
        }
        rep.max_relative_error = std::max(rep.max_relative_error, to_double(rabs(x - target) / L));
      }
    }
  });
  return rep;
}

}  // namespace bcmf
