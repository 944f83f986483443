#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace surq {

// User-facing configuration mistakes; the CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BenchmarkConfig {
  std::string preset;
  std::vector<std::string> criteria = {"prob", "var", "rs"};
  int replications = 10;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int oracle_samples = 100000;
  // Optional overrides of the preset's engine settings.
  std::optional<int> n_initial;
  std::optional<int> n_total;
  std::optional<int> cloud_size;

  void validate() const;  // throws ConfigError
};

// Strict JSON parsing: unknown or mistyped keys raise ConfigError naming the
// key. emit_config produces JSON that parses back to the same configuration.
BenchmarkConfig parse_config(const std::string& json_text);
std::string emit_config(const BenchmarkConfig& cfg);

}  // namespace surq
