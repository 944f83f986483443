#pragma once

#include <string>
#include <vector>

#include "surq/criteria.hpp"
#include "surq/gp.hpp"
#include "surq/percentile.hpp"
#include "surq/testbed.hpp"

namespace surq {

enum class Strategy { Prob, Var, RandomSearch };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);  // throws on unknown

struct SurConfig {
  int n_initial = 10;
  int n_total = 30;  // total evaluations, initial design included
  int cloud_size = 1000;
  double alpha = 0.85;
  bool renew_cloud = true;      // fresh cloud every iteration
  bool search_on_cloud = false; // candidates = the cloud itself
  int pool_size = 100000;       // otherwise: filtered down to a shortlist
  int shortlist = 300;
  bool local_refine = false;    // pattern-search polish (Var strategy only)
  int refine_max_evals = 50;
  KernelFamily family = KernelFamily::Matern32;
  TrendBasis basis = TrendBasis::Constant;
  int refit_every = 1;  // hyperparameter refits; 0 = one-step updates only
  CriterionOptions criterion;
  FitOptions fit;
  std::uint64_t seed = 1;

  void validate(int dim) const;
};

struct IterationLog {
  int n_before = 0;             // design size when the point was chosen
  double estimate = 0.0;        // percentile estimate at that size
  double criterion_value = 0.0; // J at the chosen point (0 for random search)
  int n_intervals = 0;
  bool uniform_fallback = false;  // shortlist weights all vanished
  Eigen::VectorXd x;
  double g = 0.0;
  double seconds = 0.0;
};

struct RunRecord {
  Strategy strategy = Strategy::Var;
  std::vector<double> estimates;  // one per design size n_initial..n_total
  std::vector<IterationLog> steps;
  Design design;
  KernelParams kernel;  // hyperparameters at the end of the run
  double seconds = 0.0;
};

// Sequential design loop: estimate the percentile on the current metamodel,
// choose the next evaluation point by the strategy, evaluate, recondition.
// RandomSearch shares the loop and the metamodel; only the choice of the
// next point is random.
RunRecord run_sur(const TestFunction& fn, const InputDistribution& dist,
                  const SurConfig& cfg, Strategy strategy);

}  // namespace surq
