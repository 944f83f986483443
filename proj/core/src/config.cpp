#include "surq/config.hpp"

#include <set>

#include <json.hpp>

namespace surq {

namespace {

const std::set<std::string> kCriteria = {"prob", "var", "rs"};

}  // namespace

void BenchmarkConfig::validate() const {
  if (preset.empty()) throw ConfigError("config: 'preset' is required");
  if (criteria.empty()) throw ConfigError("config: 'criteria' must not be empty");
  for (const auto& c : criteria) {
    if (!kCriteria.count(c))
      throw ConfigError("config: unknown criterion '" + c +
                        "' (expected prob, var, or rs)");
  }
  if (replications < 1)
    throw ConfigError("config: 'replications' must be at least 1");
  if (oracle_samples < 1000)
    throw ConfigError("config: 'oracle_samples' must be at least 1000");
  auto check_pos = [](const std::optional<int>& v, const char* name) {
    if (v && *v < 1)
      throw ConfigError(std::string("config: '") + name + "' must be positive");
  };
  check_pos(n_initial, "n_initial");
  check_pos(n_total, "n_total");
  check_pos(cloud_size, "cloud_size");
}

BenchmarkConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  static const std::set<std::string> known = {
      "preset",     "criteria",  "replications", "seed",      "out_dir",
      "oracle_samples", "n_initial", "n_total",      "cloud_size"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }

  BenchmarkConfig cfg;
  auto get = [&](const char* key, auto& out, const char* type) {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<std::decay_t<decltype(out)>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("config: key '") + key + "' must be " +
                        type);
    }
  };
  get("preset", cfg.preset, "a string");
  get("criteria", cfg.criteria, "an array of strings");
  get("replications", cfg.replications, "an integer");
  get("seed", cfg.seed, "an unsigned integer");
  get("out_dir", cfg.out_dir, "a string");
  get("oracle_samples", cfg.oracle_samples, "an integer");

  auto get_opt = [&](const char* key, std::optional<int>& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    if (!j.at(key).is_number_integer())
      throw ConfigError(std::string("config: key '") + key +
                        "' must be an integer");
    out = j.at(key).get<int>();
  };
  get_opt("n_initial", cfg.n_initial);
  get_opt("n_total", cfg.n_total);
  get_opt("cloud_size", cfg.cloud_size);

  cfg.validate();
  return cfg;
}

std::string emit_config(const BenchmarkConfig& cfg) {
  nlohmann::json j;
  j["preset"] = cfg.preset;
  j["criteria"] = cfg.criteria;
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["oracle_samples"] = cfg.oracle_samples;
  if (cfg.n_initial) j["n_initial"] = *cfg.n_initial;
  if (cfg.n_total) j["n_total"] = *cfg.n_total;
  if (cfg.cloud_size) j["cloud_size"] = *cfg.cloud_size;
  return j.dump(2);
}

}  // namespace surq
