#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "surq/config.hpp"

namespace surq {

// One row per (criterion, replication, design size).
struct ResultRow {
  std::string preset;
  std::string criterion;
  int replication = 0;
  int n = 0;  // evaluations used when the estimate was made
  double estimate = 0.0;
  double error_pct = 0.0;
  double seconds = 0.0;  // cumulative wall time; excluded from reproducibility
};

void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows);
void write_results_jsonl(const std::string& path,
                         const std::vector<ResultRow>& rows);
// Per (criterion, n) across replications: mean error and the 10th/90th
// error percentiles by the order-statistic rule.
void write_summary_csv(const std::string& path,
                       const std::vector<ResultRow>& rows);

// Runs every requested criterion and replication of the preset, then writes
// results.csv, results.jsonl, summary.csv, and run_meta.json under out_dir.
// A failed replication is recorded and the rest continue. Returns 0 when
// everything succeeded, 2 otherwise.
int run_benchmark(const BenchmarkConfig& cfg, std::ostream& log);

}  // namespace surq
