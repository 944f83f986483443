#include "surq/run_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "surq/percentile.hpp"
#include "surq/presets.hpp"
#include "surq/rng.hpp"

namespace surq {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows) {
  auto out = open_out(path);
  out << "preset,criterion,replication,n,estimate,error_pct,seconds\n";
  for (const auto& r : rows) {
    out << r.preset << ',' << r.criterion << ',' << r.replication << ','
        << r.n << ',' << fmt17(r.estimate) << ',' << fmt17(r.error_pct) << ','
        << fmt17(r.seconds) << '\n';
  }
}

void write_results_jsonl(const std::string& path,
                         const std::vector<ResultRow>& rows) {
  auto out = open_out(path);
  for (const auto& r : rows) {
    nlohmann::json j;
    j["preset"] = r.preset;
    j["criterion"] = r.criterion;
    j["replication"] = r.replication;
    j["n"] = r.n;
    j["estimate"] = fmt17(r.estimate);
    j["error_pct"] = fmt17(r.error_pct);
    j["seconds"] = fmt17(r.seconds);
    out << j.dump() << '\n';
  }
}

void write_summary_csv(const std::string& path,
                       const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.criterion, r.n}].push_back(r.error_pct);

  auto out = open_out(path);
  out << "criterion,n,mean_error_pct,q10_error_pct,q90_error_pct\n";
  for (auto& [key, errs] : groups) {
    std::sort(errs.begin(), errs.end());
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= errs.size();
    int R = static_cast<int>(errs.size());
    double q10 = errs[percentile_rank(R, 0.10) - 1];
    double q90 = errs[percentile_rank(R, 0.90) - 1];
    out << key.first << ',' << key.second << ',' << fmt17(mean) << ','
        << fmt17(q10) << ',' << fmt17(q90) << '\n';
  }
}

int run_benchmark(const BenchmarkConfig& cfg, std::ostream& log) {
  cfg.validate();
  Preset preset = make_preset(cfg.preset);
  if (cfg.n_initial) preset.config.n_initial = *cfg.n_initial;
  if (cfg.n_total) preset.config.n_total = *cfg.n_total;
  if (cfg.cloud_size) preset.config.cloud_size = *cfg.cloud_size;
  preset.config.validate(input_dim(preset.dist));

  std::filesystem::create_directories(cfg.out_dir);

  log << "oracle for " << preset.name << " (" << cfg.oracle_samples
      << " samples)\n";
  OraclePercentile oracle =
      oracle_percentile(preset.fn, preset.dist, preset.config.alpha,
                        cfg.oracle_samples, derive_stream(cfg.seed, "oracle"));
  log << "  value " << oracle.value << "  band [" << oracle.band_lo << ", "
      << oracle.band_hi << "]  spread " << oracle.spread << "\n";

  std::vector<ResultRow> rows;
  nlohmann::json run_status = nlohmann::json::array();
  bool any_failed = false;

  for (const auto& crit : cfg.criteria) {
    Strategy strat = strategy_from_name(crit);
    for (int r = 0; r < cfg.replications; ++r) {
      SurConfig run_cfg = preset.config;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
      long evals_before = preset.fn.evaluations->load();
      nlohmann::json status;
      status["criterion"] = crit;
      status["replication"] = r;
      try {
        RunRecord rec = run_sur(preset.fn, preset.dist, run_cfg, strat);
        double cum = 0.0;
        for (std::size_t i = 0; i < rec.estimates.size(); ++i) {
          ResultRow row;
          row.preset = preset.name;
          row.criterion = crit;
          row.replication = r;
          row.n = run_cfg.n_initial + static_cast<int>(i);
          row.estimate = rec.estimates[i];
          row.error_pct = error_percent(rec.estimates[i], oracle);
          if (i < rec.steps.size()) cum += rec.steps[i].seconds;
          row.seconds = (i < rec.steps.size()) ? cum : rec.seconds;
          rows.push_back(std::move(row));
        }
        status["status"] = "ok";
        status["evaluations"] =
            preset.fn.evaluations->load() - evals_before;
        log << "  " << crit << " rep " << r << ": final error "
            << rows.back().error_pct << "% (" << rec.seconds << "s)\n";
      } catch (const std::exception& e) {
        any_failed = true;
        status["status"] = "failed";
        status["error"] = e.what();
        log << "  " << crit << " rep " << r << " FAILED: " << e.what() << "\n";
      }
      run_status.push_back(std::move(status));
    }
  }

  auto path = [&](const char* f) {
    return (std::filesystem::path(cfg.out_dir) / f).string();
  };
  write_results_csv(path("results.csv"), rows);
  write_results_jsonl(path("results.jsonl"), rows);
  write_summary_csv(path("summary.csv"), rows);

  nlohmann::json meta;
  meta["config"] = nlohmann::json::parse(emit_config(cfg));
  meta["oracle"] = {{"value", oracle.value},
                    {"band_lo", oracle.band_lo},
                    {"band_hi", oracle.band_hi},
                    {"spread", oracle.spread},
                    {"samples", oracle.n}};
  meta["runs"] = std::move(run_status);
  open_out(path("run_meta.json")) << meta.dump(2) << '\n';

  return any_failed ? 2 : 0;
}

}  // namespace surq
