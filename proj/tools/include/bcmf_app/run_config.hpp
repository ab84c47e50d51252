#pragma once

// Run configuration: defaults, plain-text key = value files, validation.

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>

namespace bcmf::app {

/// Bad configuration value or file; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double a = 2.0;
  double lambda = 0.9 * std::numbers::ln2;
  double epsilon = 0.01;
  std::size_t N = 5;
  std::size_t horizon_certify = 1000;
  std::size_t horizon_anchor = 1000;
  std::size_t horizon_induce = 60;  // T_max
  std::size_t horizon_ldp = 30;     // n for the deviation estimate
  int precision_bits = 128;
  std::uint64_t seed = 1;
  std::string out = "bcmf-out";
  std::string obs = "x";
  unsigned workers = 1;

  std::size_t p_max = 30;
  double min_mass = 1e-5;
  std::size_t lemma_samples = 1000;
  std::size_t spectrum_q = 8;  // lap horseshoe iterate
  std::size_t spectrum_L = 2;  // word length
  std::size_t grid = 41;
  std::size_t ldp_samples = 100000;
  double window_lo = 0.3;
  double window_hi = 0.5;
  std::size_t legendre_n = 20;
  unsigned legendre_nodes = 7;

  /// Throws ConfigError.
  void validate() const;
  /// Sets one key from its text value; throws ConfigError on unknown keys.
  void set(const std::string& key, const std::string& value);

  nlohmann::json to_json() const;
  /// sha256 of the compact JSON echo, without `out` and `workers`.
  std::string hash() const;
};

/// Applies `key = value` lines (# starts a comment) on top of `config`.
void load_config_file(const std::filesystem::path& path, RunConfig& config);

}  // namespace bcmf::app
