#include "bcmf_app/commands.hpp"

#include "bcmf/binding.hpp"
#include "bcmf/certify.hpp"
#include "bcmf/inducing.hpp"
#include "bcmf/ldp.hpp"
#include "bcmf/rng.hpp"
#include "bcmf/thermo.hpp"
#include "bcmf_app/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <set>

#ifndef BCMF_VERSION
#define BCMF_VERSION "unknown"
#endif

namespace bcmf::app {

namespace fs = std::filesystem;

namespace {

class StageFailure : public std::runtime_error {
 public:
  StageFailure(const std::string& stage, const std::string& what)
      : std::runtime_error(what), stage(stage) {}
  std::string stage;
};

/// Dependency violation or unusable prior artifacts; exit 2.
class DependencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json with_config(json j, const RunConfig& config) {
  j["config"] = config.to_json();
  j["config_hash"] = config.hash();
  return j;
}

std::vector<std::string> witness_cells(const std::optional<MeasureStats>& w) {
  if (!w) return {"nan", "nan", "nan"};
  return {fmt(w->h), fmt(w->lambda), fmt(w->mean)};
}

const std::map<std::string, std::vector<std::string>> kStageFiles{
    {"partition", {"delta_table.json", "delta_table.csv", "partition.json"}},
    {"induce", {"induced_system.json", "tail.csv", "returns.csv"}},
    {"spectrum", {"horseshoe.json", "spectrum.csv", "spectrum.json"}},
    {"ldp", {"rate.csv", "legendre.csv", "deviation.json"}}};

const std::map<std::string, std::string> kDependency{
    {"induce", "partition"}, {"spectrum", "induce"}, {"ldp", "induce"}};

BindingConfig binding_config(const RunConfig& c) {
  BindingConfig b;
  b.epsilon = c.epsilon;
  b.N = c.N;
  b.p_max = c.p_max;
  b.anchor_horizon = c.horizon_anchor;
  b.precision_bits = c.precision_bits;
  return b;
}

const std::vector<std::string> kLegendreSpecs{"x", "x2", "cospix", "zero"};

/// Observables evaluated on the cylinders of the ldp stage: phi first, then
/// the Legendre list.
std::vector<std::string> ldp_specs(const RunConfig& c) {
  std::vector<std::string> specs{c.obs};
  for (const auto& name : kLegendreSpecs)
    if (c.obs != name) specs.push_back(name);
  return specs;
}

class Pipeline {
 public:
  Pipeline(const RunConfig& config, std::ostream& out) : config_(config), dir_(config.out), out_(out) {}

  void run(const std::vector<std::string>& stages) {
    fs::create_directories(dir_);
    load_manifest();
    const std::set<std::string> requested(stages.begin(), stages.end());
    // Dependencies not requested must already exist, written under this config.
    for (const auto& s : stages)
      for (auto d = kDependency.find(s); d != kDependency.end(); d = kDependency.find(d->second))
        if (!requested.count(d->second)) require_artifacts(d->second, s);

    for (const auto& s : stages) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<std::string> files;
      try {
        files = run_stage(s);
      } catch (const DependencyError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageFailure(s, e.what());
      }
      const double wall = seconds_since(t0);
      manifest_["stages"][s] = {{"wall_seconds", wall}, {"files", files}};
      for (const auto& f : files) manifest_["files"][f] = sha256_file(dir_ / f);
      write_manifest();
      out_ << "stage " << s << ": " << std::fixed << std::setprecision(2) << wall << " s\n"
           << std::defaultfloat;
    }
  }

 private:
  void load_manifest() {
    const auto path = dir_ / "manifest.json";
    if (fs::exists(path)) {
      json old = read_json(path);
      if (old.value("config_hash", "") == config_.hash()) {
        manifest_ = old;
        for (const auto& [name, hash] : manifest_["files"].items())
          if (!fs::exists(dir_ / name) || sha256_file(dir_ / name) != hash.get<std::string>())
            out_ << "warning: " << name << " does not match its manifest hash\n";
      }
    }
    if (manifest_.is_null()) manifest_ = {{"stages", json::object()}, {"files", json::object()}};
    manifest_["version"] = BCMF_VERSION;
    manifest_["config"] = config_.to_json();
    manifest_["config_hash"] = config_.hash();
    manifest_["seeds"] = {{"root", config_.seed},
                          {"lemma_P", config_.seed},
                          {"acip_mean", derive_seed(config_.seed, 1)},
                          {"deviation", derive_seed(config_.seed, 2)}};
  }

  void write_manifest() { write_json(dir_ / "manifest.json", manifest_); }

  void require_artifacts(const std::string& stage, const std::string& for_stage) {
    for (const auto& f : kStageFiles.at(stage)) {
      const auto path = dir_ / f;
      if (!fs::exists(path))
        throw DependencyError("stage " + for_stage + " needs " + stage + " artifacts; missing " + path.string() +
                              " (add " + stage + " to --stages)");
      if (path.extension() == ".json" && read_json(path).value("config_hash", "") != config_.hash())
        throw DependencyError(path.string() + " was written under a different config");
    }
  }

  std::vector<std::string> run_stage(const std::string& s) {
    if (s == "partition") return stage_partition();
    if (s == "induce") return stage_induce();
    if (s == "spectrum") return stage_spectrum();
    return stage_ldp();
  }

  const CriticalPartition& partition() {
    if (!partition_)
      partition_ = build_critical_partition(QuadraticMap(config_.a, config_.precision_bits), binding_config(config_),
                                            config_.workers);
    return *partition_;
  }

  const InducedSystem& system() {
    if (!system_) {
      InducingConfig ic;
      ic.T_max = config_.horizon_induce;
      ic.min_mass = config_.min_mass;
      system_ = build_induced_map(QuadraticMap(config_.a), partition(), ic);
    }
    return *system_;
  }

  std::vector<std::string> stage_partition() {
    const QuadraticMap map(config_.a, config_.precision_bits);
    const auto& part = partition();
    const auto lemma = verify_lemma_P(map, part.table, config_.lambda, config_.N + 1, config_.p_max,
                                      config_.lemma_samples, config_.seed, config_.workers);
    json dt = to_json(part.table);
    dt["lemma_P"] = to_json(lemma);
    write_json(dir_ / "delta_table.json", with_config(dt, config_));

    std::vector<std::vector<std::string>> rows{{"p", "delta"}};
    for (std::size_t p = 1; p <= part.table.deltas.size(); ++p)
      rows.push_back({std::to_string(p), fmt(part.table.delta(p))});
    write_csv(dir_ / "delta_table.csv", rows);

    write_json(dir_ / "partition.json", with_config(to_json(part), config_));
    out_ << "partition: " << part.elements.size() << " elements, delta " << fmt(part.delta) << ", Lemma P violations "
         << lemma.total_violations() << "\n";
    return kStageFiles.at("partition");
  }

  std::vector<std::string> stage_induce() {
    const auto& sys = system();
    const auto tail = return_time_tail(sys);
    const auto markov = markov_check(sys);
    InducedSystem copy = sys;
    const auto distortion = distortion_check(copy, 8);

    json j = to_json(sys);
    j["tail_fit"] = to_json(tail);
    j["markov"] = to_json(markov);
    j["distortion"] = to_json(distortion);
    write_json(dir_ / "induced_system.json", with_config(j, config_));

    std::vector<std::vector<std::string>> rows{{"n", "tail"}};
    for (std::size_t n = 0; n < sys.tail.size(); ++n) rows.push_back({std::to_string(n), fmt(sys.tail[n])});
    write_csv(dir_ / "tail.csv", rows);

    std::map<std::size_t, std::pair<std::size_t, double>> by_R;
    for (const auto& b : sys.branches) {
      by_R[b.R].first += 1;
      by_R[b.R].second += b.length;
    }
    std::vector<std::vector<std::string>> ret{{"R", "branches", "mass"}};
    for (const auto& [R, v] : by_R) ret.push_back({std::to_string(R), std::to_string(v.first), fmt(v.second)});
    write_csv(dir_ / "returns.csv", ret);

    out_ << "induce: " << sys.branches.size() << " branches, coverage " << fmt(sys.coverage()) << ", zeta "
         << fmt(tail.zeta) << ", Markov error " << fmt(markov.max_relative_error) << "\n";
    return kStageFiles.at("induce");
  }

  json horseshoe_json(const Horseshoe& h, const CylinderData& cd) {
    json j = to_json(h);
    j["check"] = to_json(verify_horseshoe(h));
    const auto root = pressure_root(cd);
    j["pressure_root"] = root ? num(*root) : json(nullptr);
    return j;
  }

  std::vector<std::string> stage_spectrum() {
    const QuadraticMap map(config_.a);
    const Observable phi = Observable::from_spec(config_.obs, config_.a);

    json hs;
    try {
      const auto ex = extract_horseshoe(map, system());
      hs["extracted"] = horseshoe_json(ex, enumerate_cylinders(ex, {phi}, 2, 2'000'000, config_.workers));
    } catch (const DomainError& e) {
      hs["extracted"] = {{"error", e.what()}};
    }
    const auto H = lap_horseshoe(map, config_.spectrum_q);
    const auto cd = enumerate_cylinders(H, {phi}, config_.spectrum_L, 2'000'000, config_.workers);
    hs["laps"] = horseshoe_json(H, cd);
    hs["spectrum_uses"] = "laps";
    write_json(dir_ / "horseshoe.json", with_config(hs, config_));

    auto fc = FamilyConfig::defaults();
    fc.workers = config_.workers;
    const auto family = build_family(map, cd, phi, fc);
    SpectrumConfig sc;
    sc.grid_points = config_.grid;
    sc.refine_sigmas = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
    const auto curve = birkhoff_spectrum(cd, family, sc);
    const auto acip = birkhoff_monte_carlo(map, phi, 100000, 20, derive_seed(config_.seed, 1), config_.workers);
    const auto at_mean = birkhoff_spectrum(cd, family, sc, {acip.mean});
    const auto props = spectrum_property_check(curve, acip.mean, 1e-3, 0.1);

    std::vector<std::vector<std::string>> rows{{"alpha", "B", "witness_h", "witness_lambda", "witness_mean"}};
    for (std::size_t i = 0; i < curve.alpha.size(); ++i) {
      std::vector<std::string> r{fmt(curve.alpha[i]), fmt(curve.B[i])};
      for (auto& c : witness_cells(curve.witness[i])) r.push_back(c);
      rows.push_back(r);
    }
    write_csv(dir_ / "spectrum.csv", rows);

    json j = to_json(curve);
    j["acip_mean"] = {{"value", num(acip.mean)}, {"std_error", num(acip.std_error)}, {"orbits", acip.samples}};
    j["B_at_mean"] = num(at_mean.B[0]);
    j["properties"] = to_json(props);
    j["note"] = "c_phi, d_phi are inner approximations from the family and periodic orbits";
    write_json(dir_ / "spectrum.json", with_config(j, config_));

    out_ << "spectrum: [" << fmt(curve.c_phi) << ", " << fmt(curve.d_phi) << "], B(" << fmt(acip.mean)
         << ") = " << fmt(at_mean.B[0]) << "\n";
    return kStageFiles.at("spectrum");
  }

  std::vector<std::string> stage_ldp() {
    system();  // dependency: the induced system must build under this config
    const QuadraticMap map(config_.a);
    const auto specs = ldp_specs(config_);
    std::vector<Observable> obs;
    for (const auto& spec : specs) obs.push_back(Observable::from_spec(spec, config_.a));
    const auto H = lap_horseshoe(map, config_.spectrum_q);
    const auto cd = enumerate_cylinders(H, obs, config_.spectrum_L, 2'000'000, config_.workers);
    auto fc = FamilyConfig::defaults();
    fc.workers = config_.workers;
    std::vector<MeasureFamily> families;
    for (std::size_t k = 0; k < obs.size(); ++k) families.push_back(build_family(map, cd, obs[k], fc, k));

    // Rate function of phi on the spectrum grid.
    double c = families[0].members.front().mean, d = c;
    for (const auto* set : {&families[0].members, &families[0].periodic})
      for (const auto& m : *set) {
        c = std::min(c, m.mean);
        d = std::max(d, m.mean);
      }
    std::vector<double> grid(config_.grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      grid[i] = grid.size() == 1 ? c : c + (d - c) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    const auto rate = rate_function(cd, families[0], grid);
    std::vector<std::vector<std::string>> rows{{"alpha", "F", "witness_h", "witness_lambda", "witness_mean"}};
    for (std::size_t i = 0; i < rate.alpha.size(); ++i) {
      std::vector<std::string> r{fmt(rate.alpha[i]), fmt(rate.F[i])};
      for (auto& cell : witness_cells(rate.witness[i])) r.push_back(cell);
      rows.push_back(r);
    }
    write_csv(dir_ / "rate.csv", rows);

    // Legendre comparison; the Richardson column uses n / 2 as the second point.
    std::vector<Observable> lobs;
    std::vector<MeasureFamily> lfams;
    for (std::size_t k = 0; k < obs.size(); ++k)
      if (std::find(kLegendreSpecs.begin(), kLegendreSpecs.end(), specs[k]) != kLegendreSpecs.end()) {
        lobs.push_back(obs[k]);
        lfams.push_back(families[k]);
      }
    const std::size_t n = config_.legendre_n, n2 = std::max<std::size_t>(1, n / 2);
    const auto leg = legendre_check(map, lobs, lfams, n, 0.02, config_.legendre_nodes);
    std::vector<std::vector<std::string>> lrows{
        {"observable", "n", "P_n", "family_max", "delta", "delta_corrected", "P_richardson"}};
    for (std::size_t k = 0; k < leg.rows.size(); ++k) {
      const auto& r = leg.rows[k];
      const double p2 = free_energy_quadrature(map, lobs[k], n2, config_.legendre_nodes).value;
      const double rich = n2 < n ? richardson(p2, n2, r.P_n, n) : r.P_n;
      lrows.push_back({r.observable, std::to_string(r.n), fmt(r.P_n), fmt(r.family_max), fmt(r.delta_raw),
                       fmt(r.delta_corrected), fmt(rich)});
    }
    write_csv(dir_ / "legendre.csv", lrows);

    // Deviation probability of the window at n and n / 2.
    const std::size_t m = config_.horizon_ldp, m2 = std::max<std::size_t>(1, m / 2);
    const auto dev_seed = derive_seed(config_.seed, 2);
    const auto is = deviation_probability_tilted(map, obs[0], config_.window_lo, config_.window_hi, m,
                                                 config_.ldp_samples, dev_seed, std::nullopt, std::min<std::size_t>(14, m),
                                                 config_.workers);
    const auto is2 = deviation_probability_tilted(map, obs[0], config_.window_lo, config_.window_hi, m2,
                                                  config_.ldp_samples, dev_seed, std::nullopt, std::min<std::size_t>(14, m2),
                                                  config_.workers);
    const auto plain = deviation_probability(map, obs[0], config_.window_lo, config_.window_hi, m,
                                             config_.ldp_samples, dev_seed, config_.workers);
    const auto cover = covering_estimate(map, obs[0], config_.window_lo, config_.window_hi, std::min<std::size_t>(m, 20));
    std::vector<double> wgrid(21);
    for (std::size_t i = 0; i < wgrid.size(); ++i)
      wgrid[i] = config_.window_lo + (config_.window_hi - config_.window_lo) * static_cast<double>(i) / 20.0;
    const auto wrate = rate_function(cd, families[0], wgrid);
    double wmax = kNegInf;
    for (double f : wrate.F) wmax = std::max(wmax, f);

    json dev{{"importance", to_json(is)},
             {"importance_half_n", to_json(is2)},
             {"richardson_rate", num(std::isfinite(is.log_measure_rate) && std::isfinite(is2.log_measure_rate) && m2 < m
                                         ? richardson(is2.log_measure_rate, m2, is.log_measure_rate, m)
                                         : is.log_measure_rate)},
             {"plain", to_json(plain)},
             {"covering", to_json(cover)},
             {"window_max_F", num(wmax)},
             {"legendre", to_json(leg)},
             {"rate", to_json(rate)},
             {"note", "rates are -I on constructed measures; the regularisation of I is not represented"}};
    write_json(dir_ / "deviation.json", with_config(dev, config_));

    out_ << "ldp: IS rate " << fmt(is.log_measure_rate) << " vs max F " << fmt(wmax) << ", Legendre "
         << (leg.passed() ? "pass" : "fail") << "\n";
    return kStageFiles.at("ldp");
  }

  RunConfig config_;
  fs::path dir_;
  std::ostream& out_;
  json manifest_;
  std::optional<CriticalPartition> partition_;
  std::optional<InducedSystem> system_;
};

std::optional<json> try_read(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  return read_json(p);
}

std::string value_text(const json& j) {
  if (j.is_number_float()) return fmt(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

}  // namespace

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const QuadraticMap map(config.a, config.precision_bits);
  CertificationConfig cc;
  cc.lambda = config.lambda;
  cc.horizon = config.horizon_certify;
  cc.validate();
  const auto report = certify(map, cc);
  try {
    fs::create_directories(config.out);
    write_json(fs::path(config.out) / "condition_report.json", with_config(to_json(report), config));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  out << "a = " << fmt(config.a) << ": " << (report.passed ? "PASS" : "FAIL") << "\n"
      << "  a2 margin " << fmt(report.a2.margin) << " (n = " << report.a2.argmin_n << ")\n"
      << "  a3 margin " << fmt(report.a3.margin) << " (n = " << report.a3.argmin_n << ")\n"
      << "  a4 " << to_string(report.a4.status) << "\n"
      << "  " << report.note << "\n";
  return report.passed ? kOk : kFailure;
}

int cmd_pipeline(const RunConfig& config, const std::vector<std::string>& stages, std::ostream& out,
                 std::ostream& err) {
  if (stages.empty()) {
    err << "error: no stages given\n";
    return kUsage;
  }
  std::size_t last = 0;
  for (const auto& s : stages) {
    const auto it = std::find(kStages.begin(), kStages.end(), s);
    if (it == kStages.end()) {
      err << "error: unknown stage '" << s << "'\n";
      return kUsage;
    }
    const auto idx = static_cast<std::size_t>(it - kStages.begin());
    const auto rank = [](std::size_t i) { return i >= 2 ? std::size_t{2} : i; };  // spectrum and ldp are siblings
    if (&s != &stages.front() && rank(idx) < rank(last)) {
      err << "error: stage '" << s << "' listed after a stage that depends on it\n";
      return kUsage;
    }
    last = idx;
  }
  try {
    Pipeline(config, out).run(stages);
  } catch (const StageFailure& e) {
    err << "stage " << e.stage << " failed: " << e.what() << "\n";
    return kFailure;
  } catch (const DependencyError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

int cmd_report(const fs::path& dir, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(dir)) {
    err << "error: " << dir.string() << " is not a directory\n";
    return kUsage;
  }
  try {
    const auto condition = try_read(dir / "condition_report.json");
    const auto deltas = try_read(dir / "delta_table.json");
    const auto induced = try_read(dir / "induced_system.json");
    const auto spectrum = try_read(dir / "spectrum.json");
    const auto deviation = try_read(dir / "deviation.json");
    const auto acceptance = try_read(dir / "acceptance.json");
    const auto manifest = try_read(dir / "manifest.json");
    if (!condition && !deltas && !induced && !spectrum && !deviation && !acceptance) {
      err << "error: no artifacts in " << dir.string() << "\n";
      return kUsage;
    }

    json report = json::object();
    std::ostringstream s;
    s << "bcmf report for " << dir.string() << "\n";
    if (manifest) s << "config hash " << manifest->value("config_hash", "?") << "\n";

    if (condition) {
      const auto& c = *condition;
      s << "certify: a = " << value_text(c["a"]) << " " << (c["passed"].get<bool>() ? "PASS" : "FAIL")
        << ", a2 margin " << value_text(c["a2"]["margin"]) << ", a3 margin " << value_text(c["a3"]["margin"])
        << ", a4 " << c["a4"]["status"].get<std::string>() << "\n";
      report["certify"] = c;
    } else {
      s << "certify: stage missing\n";
    }

    if (deltas) {
      s << "partition: delta_" << (*deltas)["p_max"].get<std::size_t>() << " = "
        << value_text((*deltas)["deltas"].back()["delta"]) << ", Lemma P violations "
        << (*deltas)["lemma_P"]["total_violations"].get<std::size_t>() << "\n";
      report["partition"] = *deltas;
    } else {
      s << "partition: stage missing\n";
    }

    if (induced) {
      const auto& i = *induced;
      s << "induce: " << i["branches"].get<std::size_t>() << " branches, coverage " << value_text(i["coverage"])
        << ", tail zeta " << value_text(i["tail_fit"]["zeta"]) << " (R^2 " << value_text(i["tail_fit"]["r_squared"])
        << "), Markov error " << value_text(i["markov"]["max_relative_error"]) << "\n";
      report["induce"] = i;
    } else {
      s << "induce: stage missing\n";
    }

    if (spectrum) {
      const auto& sp = *spectrum;
      s << "spectrum (" << sp["observable"].get<std::string>() << "): [c, d] = [" << value_text(sp["c_phi"]) << ", "
        << value_text(sp["d_phi"]) << "]\n"
        << "  B(mu(phi)) = " << value_text(sp["B_at_mean"]) << " at mu(phi) = "
        << value_text(sp["acip_mean"]["value"]) << "\n"
        << "  monotone violations " << sp["properties"]["monotone_violations"].get<std::size_t>()
        << ", max adjacent jump " << value_text(sp["properties"]["max_adjacent_jump"]) << "\n";
      report["spectrum"] = sp;
    } else {
      s << "spectrum: stage missing\n";
    }

    if (deviation) {
      const auto& d = *deviation;
      s << "ldp: importance rate " << value_text(d["importance"]["log_measure_rate"]) << " (n = "
        << d["importance"]["n"].get<std::size_t>() << "), max F on window " << value_text(d["window_max_F"])
        << ", Richardson " << value_text(d["richardson_rate"]) << "\n";
      for (const auto& r : d["legendre"]["rows"])
        s << "  Legendre " << r["observable"].get<std::string>() << ": delta " << value_text(r["delta_corrected"])
          << (r["passed"].get<bool>() ? " pass" : " fail") << "\n";
      report["ldp"] = d;
    } else {
      s << "ldp: stage missing\n";
    }

    if (acceptance) {
      s << "acceptance:\n";
      for (const auto& row : (*acceptance)["criteria"])
        s << "  " << row["id"].get<std::string>() << " " << (row["passed"].get<bool>() ? "PASS" : "FAIL") << "  "
          << row.value("detail", "") << "\n";
      report["acceptance"] = *acceptance;
    } else {
      s << "acceptance: not run\n";
    }

    int code = kOk;
    if (manifest) {
      std::size_t ok = 0;
      json bad = json::array();
      for (const auto& [name, hash] : (*manifest)["files"].items()) {
        if (!fs::exists(dir / name)) {
          err << "error: manifest lists missing file " << name << "\n";
          return kUsage;
        }
        if (sha256_file(dir / name) == hash.get<std::string>()) ++ok;
        else bad.push_back(name);
      }
      s << "manifest: " << ok << " files verified";
      if (!bad.empty()) {
        s << ", hash mismatch: " << bad.dump();
        code = kFailure;
      }
      s << "\n";
      report["manifest"] = {{"verified", ok}, {"mismatched", bad}};
    } else {
      s << "manifest: missing\n";
    }

    report["summary"] = s.str();
    write_json(dir / "report.json", report);
    out << s.str();
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Benedicks-Carleson quadratic family: certification, inducing, spectra and large deviations", "bcmf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BCMF_VERSION);

  std::optional<double> a, lambda, epsilon;
  std::optional<std::size_t> bigN, h_certify, h_anchor, h_induce, h_ldp;
  std::optional<int> bits;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> obs, outdir;
  std::optional<unsigned> workers;
  std::string config_file;
  std::vector<std::string> stages;
  std::string report_dir;

  const auto shared = [&](CLI::App* sub) {
    sub->add_option("--a", a, "Parameter a in (0, 2]");
    sub->add_option("--lambda", lambda, "Growth exponent (default 0.9 log 2)");
    sub->add_option("--epsilon", epsilon, "Recurrence exponent");
    sub->add_option("--bigN", bigN, "N: first bound period");
    sub->add_option("--horizon-certify,--horizon", h_certify, "Critical-orbit horizon");
    sub->add_option("--horizon-anchor", h_anchor, "Anchor recurrence horizon");
    sub->add_option("--horizon-induce", h_induce, "T_max for the induced map");
    sub->add_option("--horizon-ldp", h_ldp, "n for the deviation estimate");
    sub->add_option("--precision-bits", bits, "Working precision of critical-orbit computations");
    sub->add_option("--seed", seed, "Root seed");
    sub->add_option("--obs", obs, "Observable: x | x2 | cospix | zero | logdf | poly:c0,c1,...");
    sub->add_option("--out", outdir, "Output directory");
    sub->add_option("--workers", workers, "Worker threads");
    sub->add_option("--config", config_file, "key = value config file (flags override)");
  };

  auto* certify_cmd = app.add_subcommand("certify", "Finite-horizon checks of (A2), (A3), (A4)");
  shared(certify_cmd);
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run partition, induce, spectrum, ldp stages");
  shared(pipeline_cmd);
  pipeline_cmd->add_option("--stages", stages, "Comma-separated subset of partition,induce,spectrum,ldp")
      ->delimiter(',');
  auto* report_cmd = app.add_subcommand("report", "Merge artifacts of an output directory");
  report_cmd->add_option("dir", report_dir, "Artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (report_cmd->parsed()) return cmd_report(report_dir, out, err);

  RunConfig config;
  try {
    if (!config_file.empty()) load_config_file(config_file, config);
    if (a) config.a = *a;
    if (lambda) config.lambda = *lambda;
    if (epsilon) config.epsilon = *epsilon;
    if (bigN) config.N = *bigN;
    if (h_certify) config.horizon_certify = *h_certify;
    if (h_anchor) config.horizon_anchor = *h_anchor;
    if (h_induce) config.horizon_induce = *h_induce;
    if (h_ldp) config.horizon_ldp = *h_ldp;
    if (bits) config.precision_bits = *bits;
    if (seed) config.seed = *seed;
    if (obs) config.obs = *obs;
    if (outdir) config.out = *outdir;
    if (workers) config.workers = *workers;
    config.validate();
    if (certify_cmd->parsed()) return cmd_certify(config, out, err);
    if (stages.empty()) stages = kStages;
    return cmd_pipeline(config, stages, out, err);
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace bcmf::app
