#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "surq/config.hpp"
#include "surq/presets.hpp"
#include "surq/rng.hpp"
#include "surq/run_io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw surq::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Percentile estimation for expensive black-box functions via "
      "metamodel-guided sequential evaluation"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out_dir;
  std::vector<std::string> criteria;
  int replications = -1, n_total = -1, n_initial = -1, cloud_size = -1;
  int oracle_samples = -1;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run a benchmark preset");
  run->add_option("preset", preset_name, "Preset name (see `surq presets`)");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--criterion", criteria,
                  "Criteria to run: prob, var, rs (repeat or comma-separate)")
      ->delimiter(',');
  run->add_option("--replications", replications, "Replications per criterion");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--n-total", n_total, "Override total evaluation budget");
  run->add_option("--n-initial", n_initial, "Override initial design size");
  run->add_option("--cloud-size", cloud_size, "Override Monte Carlo cloud size");
  run->add_option("--oracle-samples", oracle_samples,
                  "Reference percentile sample size");

  std::string oracle_preset;
  int osamples = 100000;
  std::uint64_t oseed = 1;
  auto* oracle = app.add_subcommand(
      "oracle", "Print the brute-force reference percentile for a preset");
  oracle->add_option("preset", oracle_preset, "Preset name")->required();
  oracle->add_option("--samples", osamples, "Sample size");
  oracle->add_option("--seed", oseed, "Seed");

  auto* presets = app.add_subcommand("presets", "List available presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (presets->parsed()) {
      for (const auto& n : surq::preset_names()) std::cout << n << "\n";
      return 0;
    }

    if (oracle->parsed()) {
      surq::Preset p = surq::make_preset(oracle_preset);
      auto o = surq::oracle_percentile(p.fn, p.dist, p.config.alpha, osamples,
                                       surq::derive_stream(oseed, "oracle"));
      nlohmann::json j;
      j["preset"] = p.name;
      j["alpha"] = p.config.alpha;
      j["value"] = o.value;
      j["band_lo"] = o.band_lo;
      j["band_hi"] = o.band_hi;
      j["spread"] = o.spread;
      j["samples"] = o.n;
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    surq::BenchmarkConfig cfg;
    if (!config_path.empty()) cfg = surq::parse_config(read_file(config_path));
    if (!preset_name.empty()) cfg.preset = preset_name;
    if (run->count("--criterion")) cfg.criteria = criteria;
    if (run->count("--replications")) cfg.replications = replications;
    if (run->count("--seed")) cfg.seed = seed;
    if (run->count("--out")) cfg.out_dir = out_dir;
    if (run->count("--n-total")) cfg.n_total = n_total;
    if (run->count("--n-initial")) cfg.n_initial = n_initial;
    if (run->count("--cloud-size")) cfg.cloud_size = cloud_size;
    if (run->count("--oracle-samples")) cfg.oracle_samples = oracle_samples;
    cfg.validate();
    return surq::run_benchmark(cfg, std::cout);
  } catch (const surq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}
