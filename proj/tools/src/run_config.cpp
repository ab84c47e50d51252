#include "bcmf_app/run_config.hpp"

#include "bcmf/quadratic_map.hpp"
#include "bcmf_app/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace bcmf::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

template <class T>
T to_count(const std::string& key, const std::string& v) {
  T x{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
  return x;
}

}  // namespace

void RunConfig::validate() const {
  if (!(a > 0.0 && a <= 2.0)) throw DomainError("parameter a must lie in (0, 2], got " + std::to_string(a));
  if (!(lambda > 0.0 && std::isfinite(lambda))) throw ConfigError("lambda must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  const std::pair<const char*, std::size_t> counts[] = {
      {"N", N},
      {"horizon-certify", horizon_certify},
      {"horizon-anchor", horizon_anchor},
      {"horizon-induce", horizon_induce},
      {"horizon-ldp", horizon_ldp},
      {"p_max", p_max},
      {"lemma_samples", lemma_samples},
      {"spectrum_q", spectrum_q},
      {"spectrum_L", spectrum_L},
      {"grid", grid},
      {"ldp_samples", ldp_samples},
      {"legendre_n", legendre_n},
      {"workers", workers}};
  for (const auto& [name, v] : counts)
    if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
  if (p_max <= N) throw ConfigError("p_max must exceed N");
  if (spectrum_L < 2) throw ConfigError("spectrum_L must be >= 2");
  if (legendre_n > 22) throw ConfigError("legendre_n must be <= 22");
  if (!(min_mass > 0.0 && min_mass < 1.0)) throw ConfigError("min_mass must lie in (0, 1)");
  if (!(window_lo < window_hi)) throw ConfigError("window_lo must be below window_hi");
  if (legendre_nodes != 7 && legendre_nodes != 10 && legendre_nodes != 15 && legendre_nodes != 20)
    throw ConfigError("legendre_nodes must be 7, 10, 15 or 20");
  if (precision_bits < 53) throw ConfigError("precision-bits must be >= 53");
  if (out.empty()) throw ConfigError("out must not be empty");
  try {
    Observable::from_spec(obs, a);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("obs: ") + e.what());
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "a") a = to_real(key, v);
  else if (key == "lambda") lambda = to_real(key, v);
  else if (key == "epsilon") epsilon = to_real(key, v);
  else if (key == "N" || key == "bigN") N = to_count<std::size_t>(key, v);
  else if (key == "horizon_certify" || key == "horizon") horizon_certify = to_count<std::size_t>(key, v);
  else if (key == "horizon_anchor") horizon_anchor = to_count<std::size_t>(key, v);
  else if (key == "horizon_induce" || key == "T_max") horizon_induce = to_count<std::size_t>(key, v);
  else if (key == "horizon_ldp") horizon_ldp = to_count<std::size_t>(key, v);
  else if (key == "precision_bits") precision_bits = to_count<int>(key, v);
  else if (key == "seed") seed = to_count<std::uint64_t>(key, v);
  else if (key == "out") out = v;
  else if (key == "obs") obs = v;
  else if (key == "workers") workers = to_count<unsigned>(key, v);
  else if (key == "p_max") p_max = to_count<std::size_t>(key, v);
  else if (key == "min_mass") min_mass = to_real(key, v);
  else if (key == "lemma_samples") lemma_samples = to_count<std::size_t>(key, v);
  else if (key == "spectrum_q") spectrum_q = to_count<std::size_t>(key, v);
  else if (key == "spectrum_L") spectrum_L = to_count<std::size_t>(key, v);
  else if (key == "grid") grid = to_count<std::size_t>(key, v);
  else if (key == "ldp_samples") ldp_samples = to_count<std::size_t>(key, v);
  else if (key == "window_lo") window_lo = to_real(key, v);
  else if (key == "window_hi") window_hi = to_real(key, v);
  else if (key == "legendre_n") legendre_n = to_count<std::size_t>(key, v);
  else if (key == "legendre_nodes") legendre_nodes = to_count<unsigned>(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

nlohmann::json RunConfig::to_json() const {
  return {{"a", num(a)},
          {"lambda", num(lambda)},
          {"epsilon", num(epsilon)},
          {"N", N},
          {"horizon_certify", horizon_certify},
          {"horizon_anchor", horizon_anchor},
          {"horizon_induce", horizon_induce},
          {"horizon_ldp", horizon_ldp},
          {"precision_bits", precision_bits},
          {"seed", seed},
          {"out", out},
          {"obs", obs},
          {"workers", workers},
          {"p_max", p_max},
          {"min_mass", num(min_mass)},
          {"lemma_samples", lemma_samples},
          {"spectrum_q", spectrum_q},
          {"spectrum_L", spectrum_L},
          {"grid", grid},
          {"ldp_samples", ldp_samples},
          {"window", {num(window_lo), num(window_hi)}},
          {"legendre_n", legendre_n},
          {"legendre_nodes", legendre_nodes}};
}

std::string RunConfig::hash() const {
  auto j = to_json();
  j.erase("out");
  j.erase("workers");
  return sha256_hex(j.dump());
}

void load_config_file(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    for (char& c : key)
      if (c == '-') c = '_';
    config.set(key, line.substr(eq + 1));
  }
}

}  // namespace bcmf::app
