#include "bcmf_app/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcmf::app {

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json margin_json(const MarginResult& m) {
  return {{"margin", num(m.margin)}, {"argmin_n", m.argmin_n}, {"exact_return", m.exact_return}};
}

json nums(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

}  // namespace

json to_json(const ConditionReport& r) {
  json a4{{"status", to_string(r.a4.status)},
          {"net_coverage", num(r.a4.net_coverage)},
          {"newton_failures", r.a4.newton_failures},
          {"detail", r.a4.detail}};
  if (r.a4.witness)
    a4["witness"] = {{"period", r.a4.witness->period},
                     {"points", nums(r.a4.witness->points)},
                     {"multiplier", num(r.a4.witness->multiplier)}};
  return {{"a", num(r.a)},           {"horizon", r.horizon}, {"a2", margin_json(r.a2)}, {"a3", margin_json(r.a3)},
          {"a4", a4},                {"passed", r.passed},   {"note", r.note}};
}

json to_json(const DeltaTable& t) {
  json rows = json::array();
  for (std::size_t p = 1; p <= t.deltas.size(); ++p) rows.push_back({{"p", p}, {"delta", num(t.delta(p))}});
  return {{"a", num(t.a)}, {"epsilon", num(t.epsilon)}, {"N", t.N}, {"p_max", t.p_max}, {"deltas", rows}};
}

json to_json(const CriticalPartition& p) {
  json elems = json::array();
  for (const auto& e : p.elements)
    elems.push_back({{"p", e.p}, {"j", e.j}, {"lo", num(e.lo)}, {"hi", num(e.hi)}});
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& a : p.anchors) min_margin = std::min(min_margin, a.recurrence_margin);
  return {{"a", num(p.a)},
          {"raw_cells", p.cells.size()},
          {"anchors", p.anchors.size()},
          {"min_anchor_margin", num(min_margin)},
          {"delta", num(p.delta)},
          {"deep_cutoff", num(p.deep_cutoff)},
          {"lambda_plus", {num(p.lambda_lo), num(p.lambda_hi)}},
          {"reverified", p.reverified},
          {"elements", elems}};
}

json to_json(const LemmaPReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"p", row.p},
                    {"samples", row.samples},
                    {"min_expansion_margin", num(row.min_expansion_margin)},
                    {"min_lower_margin", num(row.min_lower_margin)},
                    {"min_upper_margin", num(row.min_upper_margin)},
                    {"expansion_violations", row.expansion_violations},
                    {"lower_violations", row.lower_violations},
                    {"upper_violations", row.upper_violations}});
  return {{"total_violations", r.total_violations()}, {"rows", rows}};
}

json to_json(const InducedSystem& s) {
  std::size_t max_R = 0;
  for (const auto& b : s.branches) max_R = std::max(max_R, b.R);
  return {{"a", num(s.a)},
          {"epsilon", num(s.epsilon)},
          {"lambda_plus", {num(s.lambda_lo), num(s.lambda_hi)}},
          {"delta", num(s.delta)},
          {"T_max", s.T_max},
          {"branches", s.branches.size()},
          {"max_return_time", max_R},
          {"lambda_measure", num(s.lambda_measure)},
          {"coverage", num(s.coverage())},
          {"deep_loss", num(s.deep_loss)},
          {"pruned", num(s.pruned)},
          {"unreturned", num(s.unreturned)},
          {"binding_breakdowns", s.binding_breakdowns},
          {"steps", s.steps},
          {"budget_exhausted", s.budget_exhausted},
          {"tail", nums(s.tail)}};
}

json to_json(const TailFit& f) {
  return {{"zeta", num(f.zeta)},         {"C1", num(f.C1)},           {"slope", num(f.slope)},
          {"r_squared", num(f.r_squared)}, {"first_n", f.first_n},    {"last_n", f.last_n},
          {"accepted", f.accepted},        {"note", f.note}};
}

json to_json(const MarkovReport& r) {
  return {{"branches", r.branches},
          {"max_relative_error", num(r.max_relative_error)},
          {"sign_violations", r.sign_violations}};
}

json to_json(const DistortionReport& r) {
  return {{"branches", r.branches},
          {"max_ratio", num(r.max_ratio)},
          {"koebe_violations", r.koebe_violations},
          {"max_ratio_over_koebe", num(r.max_ratio_over_koebe)}};
}

json to_json(const QuickReturnReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"k", row.k},
                    {"elements", row.elements},
                    {"violations", row.violations},
                    {"min_log_ratio_margin", num(row.min_log_ratio_margin)},
                    {"window_hi", num(row.window_hi)},
                    {"window_truncated", row.window_truncated}});
  return {{"total_violations", r.total_violations()}, {"rows", rows}};
}

json to_json(const Horseshoe& h) {
  json br = json::array();
  for (const auto& b : h.branches) br.push_back({num(b.lo), num(b.hi)});
  json j{{"kind", h.kind_name()},
         {"q", h.q},
         {"branches", h.size()},
         {"target", {num(h.target_lo), num(h.target_hi)}},
         {"intervals", br}};
  if (h.kind != Horseshoe::Kind::linear) j["a"] = num(h.a);
  if (h.connector)
    j["connector"] = {{"interval", {num(h.connector->lo), num(h.connector->hi)}},
                      {"u", h.connector->u},
                      {"tau", num(h.connector->tau)},
                      {"return_time", h.return_time}};
  return j;
}

json to_json(const HorseshoeCheck& c) {
  return {{"max_endpoint_error", num(c.max_endpoint_error)},
          {"min_gap", num(c.min_gap)},
          {"inside_target", c.inside_target},
          {"ok", c.ok}};
}

json to_json(const MeasureStats& m) {
  return {{"h", num(m.h)},           {"lambda", num(m.lambda)}, {"mean", num(m.mean)},
          {"F", num(m.free_energy())}, {"sigma", num(m.sigma)},  {"s", num(m.s)},
          {"provenance", m.provenance}};
}

json to_json(const SpectrumCurve& c) {
  json pts = json::array();
  for (std::size_t i = 0; i < c.alpha.size(); ++i) {
    json p{{"alpha", num(c.alpha[i])}, {"B", num(c.B[i])}};
    p["witness"] = c.witness[i] ? to_json(*c.witness[i]) : json(nullptr);
    pts.push_back(p);
  }
  return {{"observable", c.observable}, {"c_phi", num(c.c_phi)}, {"d_phi", num(c.d_phi)}, {"points", pts}};
}

json to_json(const SpectrumPropertyReport& r) {
  return {{"monotone_violations", r.monotone_violations},
          {"max_adjacent_jump", num(r.max_adjacent_jump)},
          {"jump_ok", r.jump_ok},
          {"passed", r.passed()},
          {"violations", r.violations}};
}

json to_json(const RateCurve& c) {
  json pts = json::array();
  for (std::size_t i = 0; i < c.alpha.size(); ++i) {
    json p{{"alpha", num(c.alpha[i])}, {"F", num(c.F[i])}};
    p["witness"] = c.witness[i] ? to_json(*c.witness[i]) : json(nullptr);
    pts.push_back(p);
  }
  return {{"observable", c.observable},
          {"points", pts},
          {"note", "I = -F on the constructed family; values bound the regularised rate from one side"}};
}

json to_json(const LegendreReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"observable", row.observable},
                    {"n", row.n},
                    {"P_n", num(row.P_n)},
                    {"family_max", num(row.family_max)},
                    {"correction", num(row.correction)},
                    {"delta_raw", num(row.delta_raw)},
                    {"delta_corrected", num(row.delta_corrected)},
                    {"passed", row.passed}});
  return {{"threshold", num(r.threshold)}, {"passed", r.passed()}, {"rows", rows}};
}

json to_json(const DeviationEstimate& e) {
  json j{{"observable", e.observable},
         {"n", e.n},
         {"window", {num(e.alpha_lo), num(e.alpha_hi)}},
         {"samples", e.samples},
         {"seed", e.seed},
         {"method", e.method},
         {"hits", e.hits},
         {"measure", num(e.measure)},
         {"log_measure_rate", num(e.log_measure_rate)},
         {"std_error", num(e.std_error)},
         {"needs_tilting", e.needs_tilting}};
  if (e.method == "importance") {
    j["tilt"] = num(e.tilt);
    j["lap_depth"] = e.lap_depth;
  }
  return j;
}

json to_json(const FreeEnergyEstimate& e) {
  json j{{"observable", e.observable}, {"n", e.n},
         {"method", e.method},         {"value", num(e.value)},
         {"correction", num(e.correction)}, {"corrected", num(e.corrected())}};
  if (e.method == "quadrature") j["laps"] = e.laps;
  else j["std_error"] = num(e.std_error);
  return j;
}

json to_json(const CoveringEstimate& e) {
  return {{"n", e.n},
          {"cylinders", e.cylinders},
          {"selected", e.selected},
          {"total_length", num(e.total_length)},
          {"rate", num(e.rate)}};
}

void write_csv(const std::filesystem::path& path, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace bcmf::app
