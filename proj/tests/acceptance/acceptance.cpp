// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--json FILE] [--only AC1,AC5,...]

#include "bcmf/binding.hpp"
#include "bcmf/certify.hpp"
#include "bcmf/inducing.hpp"
#include "bcmf/ldp.hpp"
#include "bcmf/thermo.hpp"
#include "bcmf_app/commands.hpp"
#include "bcmf_app/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <unistd.h>

using namespace bcmf;
namespace fs = std::filesystem;

namespace {

constexpr double ln2 = std::numbers::ln2;

struct Result {
  bool passed = false;
  std::string detail;
};

std::string f6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The a = 2 lap horseshoe shared by AC6, AC7, AC9, AC10.
struct LapSetup {
  QuadraticMap map{2.0};
  std::vector<Observable> obs{Observable::identity(), Observable::log_derivative_proxy(2.0), Observable::square(),
                              Observable::cos_pi(), Observable::constant(0.0)};
  Horseshoe horseshoe;
  CylinderData cd;
  std::vector<std::optional<MeasureFamily>> families;

  LapSetup() : horseshoe(lap_horseshoe(map, 8)), cd(enumerate_cylinders(horseshoe, obs, 2)), families(obs.size()) {}

  const MeasureFamily& family(std::size_t k) {
    if (!families[k]) families[k] = build_family(map, cd, obs[k], FamilyConfig::defaults(), k);
    return *families[k];
  }
};

LapSetup& lap_setup() {
  static LapSetup s;
  return s;
}

const std::vector<double> kRefineSigmas{0.2, 0.4, 0.6, 0.8, 1.0, 1.2};

Result ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  CertificationConfig cfg;  // lambda = 0.9 log 2, horizon 1000
  const auto r2 = certify(QuadraticMap(2.0, 128), cfg);
  const double want2 = std::log(4.0) - 0.9 * ln2;
  const double e2 = std::abs(r2.a2.margin - want2), e3 = std::abs(r2.a3.margin - 0.01);

  // Superstable period 3: root of f_a^3(0) = 1 - a (1 - a)^2 near 1.75.
  double lo = 1.7, hi = 1.8;
  const auto g = [](double a) { return 1.0 - a * (1.0 - a) * (1.0 - a); };
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  const double a3 = 0.5 * (lo + hi);
  const auto rs = certify(QuadraticMap(a3, 128), cfg);
  const double secs = seconds_since(t0);

  Result r;
  r.passed = e2 <= 1e-12 && e3 <= 1e-12 && r2.passed && rs.a2.margin < 0 && rs.a3.margin < 0 && secs < 1.0;
  r.detail = "a=2: |a2-(log4-0.9log2)| " + f6(e2) + ", |a3-0.01| " + f6(e3) + "; a=" + std::to_string(a3) +
             ": a2 " + f6(rs.a2.margin) + ", a3 " + f6(rs.a3.margin) + "; " + f6(secs) + " s";
  return r;
}

BindingConfig binding_n6() {
  BindingConfig bc;
  bc.N = 6;
  bc.p_max = 40;
  bc.precision_bits = 128;
  return bc;
}

Result ac2() {
  const auto table = compute_delta_table(QuadraticMap(2.0, 128), binding_n6());
  double max_rel = 0;
  bool decreasing = true, lower = true;
  std::size_t lower_from = 0;
  for (std::size_t p = 1; p <= 40; ++p) {
    const double want = std::sqrt(3.0 * std::exp(-0.01 * static_cast<double>(p)) /
                                  (10.0 * (std::pow(4.0, static_cast<double>(p)) - 1.0)));
    max_rel = std::max(max_rel, std::abs(table.delta(p) - want) / want);
    if (p > 1 && !(table.delta(p) < table.delta(p - 1))) decreasing = false;
    const bool ok = table.delta(p) * table.delta(p) >= std::pow(5.0, -static_cast<double>(p));
    if (p > 5 && !ok) lower = false;
    if (!ok) lower_from = p;
  }
  Result r;
  r.passed = max_rel <= 1e-10 && decreasing && lower;
  r.detail = "max rel err " + f6(max_rel) + ", decreasing " + (decreasing ? "yes" : "no") +
             ", delta_p^2 >= 5^-p for p >= 6 " + (lower ? "yes" : "no") + " (fails up to p = " +
             std::to_string(lower_from) + ", see notes)";
  return r;
}

Result ac3() {
  const auto t0 = std::chrono::steady_clock::now();
  const QuadraticMap map(2.0, 128);
  const auto bc = binding_n6();
  const auto table = compute_delta_table(map, bc);
  const auto rep = verify_lemma_P(map, table, 0.9 * ln2, 6, 30, 1000, 1);
  std::size_t ev = 0, lv = 0, uv = 0;
  const double inf = std::numeric_limits<double>::infinity();
  double em = inf, lm = inf, um = inf;
  for (const auto& row : rep.rows) {
    ev += row.expansion_violations;
    lv += row.lower_violations;
    uv += row.upper_violations;
    em = std::min(em, row.min_expansion_margin);
    lm = std::min(lm, row.min_lower_margin);
    um = std::min(um, row.min_upper_margin);
  }
  const double secs = seconds_since(t0);
  Result r;
  r.passed = ev == 0 && lv == 0 && uv == 0 && secs < 30.0;
  r.detail = "N=6, p in [6,30], 1000 samples/annulus: violations expansion " + std::to_string(ev) + ", lower " +
             std::to_string(lv) + ", upper " + std::to_string(uv) + "; min margins " + f6(em) + ", " + f6(lm) +
             ", " + f6(um) + "; " + f6(secs) + " s";
  return r;
}

Result ac4() {
  const auto part = build_critical_partition(QuadraticMap(2.0, 128), BindingConfig{});
  InducingConfig ic;
  ic.T_max = 60;
  const auto sys = build_induced_map(QuadraticMap(2.0), part, ic);
  const auto markov = markov_check(sys);
  const auto fit = return_time_tail(sys);
  bool nonincreasing = true;
  for (std::size_t n = 1; n < sys.tail.size(); ++n)
    if (sys.tail[n] > sys.tail[n - 1] * (1 + 1e-12)) nonincreasing = false;
  const bool markov_ok = markov.max_relative_error <= 1e-9 && markov.sign_violations == 0;
  const bool coverage_ok = sys.coverage() >= 0.99;
  Result r;
  r.passed = markov_ok && nonincreasing && fit.accepted && coverage_ok;
  r.detail = "N=5, T_max=60: " + std::to_string(sys.branches.size()) + " branches, Markov err " +
             f6(markov.max_relative_error) + (markov_ok ? " ok" : " FAIL") + ", tail non-increasing " +
             (nonincreasing ? "yes" : "no") + ", slope " + f6(fit.slope) + " R^2 " + f6(fit.r_squared) +
             (fit.accepted ? " ok" : " FAIL") + ", coverage " + f6(sys.coverage()) + (coverage_ok ? " ok" : " < 0.99 FAIL");
  return r;
}

Result ac5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto mc = lyapunov_monte_carlo(QuadraticMap(2.0), 1'000'000, 100, 1);
  const double secs = seconds_since(t0);
  Result r;
  r.passed = std::abs(mc.mean - ln2) <= 5e-3 && secs < 10.0;
  r.detail = "mean " + f6(mc.mean) + " (log 2 = " + f6(ln2) + ", se " + f6(mc.std_error) + "); " + f6(secs) + " s";
  return r;
}

Result ac6() {
  auto& S = lap_setup();
  const auto& fam = S.family(0);
  SpectrumConfig sc;
  sc.grid_points = 41;
  sc.refine_sigmas = kRefineSigmas;
  const auto curve = birkhoff_spectrum(S.cd, fam, sc);
  const auto acip = birkhoff_monte_carlo(S.map, S.obs[0], 100000, 20, 1);
  const auto at = birkhoff_spectrum(S.cd, fam, sc, {acip.mean, -1.0});
  const auto props = spectrum_property_check(curve, acip.mean, 1e-3, 0.1);
  const bool mean_ok = std::abs(acip.mean) <= 1e-2;
  const bool peak_ok = std::abs(at.B[0] - 1.0) <= 0.05;
  const bool low_ok = at.B[1] <= 0.02;
  Result r;
  r.passed = mean_ok && peak_ok && low_ok && props.passed();
  r.detail = "alpha* " + f6(acip.mean) + ", B(alpha*) " + f6(at.B[0]) + ", B(-1) " + f6(at.B[1]) +
             ", monotone violations " + std::to_string(props.monotone_violations) + ", max jump " +
             f6(props.max_adjacent_jump) + (props.jump_ok ? "" : " > 0.1 FAIL");
  return r;
}

Result ac7() {
  auto& S = lap_setup();
  const auto& fam = S.family(1);
  SpectrumConfig sc;
  sc.refine_sigmas = kRefineSigmas;
  std::vector<double> alphas;
  for (double c : {1.1, 1.3, 1.6}) alphas.push_back(c * ln2);
  const auto curve = birkhoff_spectrum(S.cd, fam, sc, alphas, 1);
  Result r;
  r.passed = true;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double want = (2 * ln2 - alphas[i]) / alphas[i];
    const double err = std::abs(curve.B[i] - want);
    r.passed = r.passed && err <= 0.05;
    r.detail += (i ? ", " : "") + std::string("B(") + f6(alphas[i] / ln2) + " log2) " + f6(curve.B[i]) + " vs " +
                f6(want);
  }
  return r;
}

Result ac8() {
  const auto h = linear_horseshoe({2.0, 4.0});
  const auto cd = enumerate_cylinders(h, {}, 13);  // depth l = 12
  const auto st = equilibrium_stats(cd, 1.0, 0.0);
  const auto mu = equilibrium_measure(cd, 1.0, 0.0);
  double w0 = 0;
  for (std::size_t i = 0; i < mu.mass.size(); ++i)
    if (mu.hi[i] <= h.branches[0].hi) w0 += mu.mass[i];
  const double h_want = -(2.0 / 3) * std::log(2.0 / 3) - (1.0 / 3) * std::log(1.0 / 3);
  const double l_want = (2.0 / 3) * ln2 + (1.0 / 3) * std::log(4.0);
  const double ew = std::abs(w0 - 2.0 / 3), eh = std::abs(st.h - h_want), el = std::abs(st.lambda - l_want);
  Result r;
  r.passed = ew <= 1e-3 && eh <= 1e-3 && el <= 1e-3;
  r.detail = "weights (" + f6(w0) + ", " + f6(1 - w0) + "), h " + f6(st.h) + " (err " + f6(eh) + "), lambda " +
             f6(st.lambda) + " (err " + f6(el) + ")";
  return r;
}

Result ac9() {
  auto& S = lap_setup();
  const std::vector<std::size_t> idx{0, 2, 3, 4};
  std::vector<Observable> obs;
  std::vector<MeasureFamily> fams;
  for (auto k : idx) {
    obs.push_back(S.obs[k]);
    fams.push_back(S.family(k));
  }
  const auto rep = legendre_check(S.map, obs, fams, 20, 0.02, 7);
  Result r;
  r.passed = true;
  for (const auto& row : rep.rows) {
    const bool zero = row.observable.rfind("const", 0) == 0;
    bool ok;
    if (zero) {
      ok = std::abs(row.P_n - ln2 / 20) <= 1e-12 && std::abs(row.delta_raw - ln2 / 20) <= 1e-4;
      r.detail += "0: delta_raw " + f6(row.delta_raw) + " vs log2/20 " + f6(ln2 / 20);
    } else {
      ok = row.passed;
      r.detail += row.observable + ": " + f6(row.delta_corrected) + ", ";
    }
    r.passed = r.passed && ok;
  }
  return r;
}

Result ac10() {
  auto& S = lap_setup();
  const auto& fam = S.family(0);
  std::vector<double> window;
  for (int i = 0; i <= 20; ++i) window.push_back(0.3 + 0.01 * i);
  const auto wr = rate_function(S.cd, fam, window);
  double wmax = kNegInf;
  for (double v : wr.F) wmax = std::max(wmax, v);
  const auto is = deviation_probability_tilted(S.map, S.obs[0], 0.3, 0.5, 30, 100000, 1);

  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-1.0 + 1.5 * i / 40.0);
  grid.push_back(-1.0);
  const auto all = rate_function(S.cd, fam, grid);
  double fmax = kNegInf;
  for (double v : all.F) fmax = std::max(fmax, v);
  const double f_low = all.F.back();

  const bool rate_ok = std::abs(is.log_measure_rate - wmax) <= 0.05;
  const bool low_ok = std::abs(f_low + std::log(4.0)) <= 0.02;
  const bool max_ok = fmax <= 1e-2;
  Result r;
  r.passed = rate_ok && low_ok && max_ok;
  r.detail = "IS rate n=30 " + f6(is.log_measure_rate) + " (se " + f6(is.std_error) + ") vs max F " + f6(wmax) +
             ", F(-1) " + f6(f_low) + ", max F " + f6(fmax);
  return r;
}

Result ac11() {
  const auto h = linear_horseshoe({2.0, 2.0});
  const auto cd = enumerate_cylinders(h, {}, 20);
  const auto nu = bernoulli_measure(cd, {0.3, 0.7});
  std::vector<double> radii;
  for (int k = 0; k <= 12; ++k) radii.push_back(std::pow(10.0, -2.0 - 0.25 * k));
  const auto pts = sample_points(nu, 400, 1);
  const auto fit = local_dimension(nu, pts, radii);
  const double want = -(0.3 * std::log(0.3) + 0.7 * std::log(0.7)) / ln2;
  Result r;
  r.passed = std::abs(fit.dimension - 0.8813) <= 0.05;
  r.detail = "slope " + f6(fit.dimension) + " (R^2 " + f6(fit.r_squared) + "), entropy/log2 " + f6(want);
  return r;
}

Result ac12() {
  const auto root = fs::temp_directory_path() / ("bcmf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  app::RunConfig cfg;
  cfg.horizon_induce = 30;
  cfg.min_mass = 1e-3;
  cfg.lemma_samples = 100;
  cfg.spectrum_q = 6;
  cfg.grid = 11;
  cfg.ldp_samples = 20000;
  cfg.horizon_ldp = 16;
  cfg.legendre_n = 12;
  std::ostringstream sink;
  std::vector<std::string> csvs;
  for (const char* run : {"run1", "run2"}) {
    cfg.out = (root / run).string();
    if (app::cmd_pipeline(cfg, app::kStages, sink, sink) != app::kOk) {
      fs::remove_all(root);
      return {false, "pipeline failed: " + sink.str()};
    }
  }
  std::size_t same = 0, total = 0;
  std::string differing;
  for (const auto& e : fs::directory_iterator(root / "run1")) {
    if (e.path().extension() != ".csv") continue;
    ++total;
    if (app::sha256_file(e.path()) == app::sha256_file(root / "run2" / e.path().filename())) ++same;
    else differing += " " + e.path().filename().string();
  }
  fs::remove_all(root);
  Result r;
  r.passed = total >= 6 && same == total;
  r.detail = std::to_string(same) + "/" + std::to_string(total) + " CSV files byte-identical" + differing;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Acceptance criteria"};
  std::string json_path;
  std::vector<std::string> only;
  cli.add_option("--json", json_path, "Also write results as JSON");
  cli.add_option("--only", only, "Criteria to run, e.g. AC1,AC5")->delimiter(',');
  CLI11_PARSE(cli, argc, argv);

  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}, {"AC12", ac12}};
  const std::set<std::string> selected(only.begin(), only.end());

  app::json rows = app::json::array();
  bool all = true;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    all = all && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << id << "  " << r.detail << "  [" << f6(secs) << " s]"
              << std::endl;
    rows.push_back({{"id", id}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", secs}});
  }
  if (!json_path.empty()) app::write_json(json_path, {{"criteria", rows}, {"all_passed", all}});
  return all ? 0 : 1;
}
