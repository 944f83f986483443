#pragma once

#include <Eigen/Dense>

#include "surq/gp.hpp"
#include "surq/percentile.hpp"

namespace surq {

struct CriterionOptions {
  // Half-width of the Z window in standard deviations of Z; the mass left
  // outside at 9 sd is below 2.3e-19 and is folded into the edge intervals.
  double window_sds = 9.0;
  // Profile intervals are merged until each carries at least this much
  // probability; keeps the bivariate-normal assembly short and stable.
  double mass_floor = 1e-14;
  bool direct_klevel = true;
  // Candidates whose posterior variance falls at or below this are treated
  // as already observed.
  double degenerate_var = 1e-12;
};

// Probability intervals of Z ~ N(0, 1/s^2) induced by a candidate profile,
// after merging segments lighter than mass_floor (each merged interval keeps
// the identity of its heaviest constituent). prob[] telescopes from the
// normal CDF at the edges and sums to 1 up to rounding.
struct MergedIntervals {
  std::vector<double> z_edges;  // interior edges, size() - 1 entries
  std::vector<double> f_edges;  // s * z_edges: edges of V = sZ ~ N(0, 1)
  std::vector<double> edge_cdf;  // Phi(f_edges), reused by the assembly
  std::vector<int> index;       // cloud index carrying the rank per interval
  std::vector<double> prob;
  double q_lo = 0.0, q_hi = 0.0;  // range of the updated percentile in the window

  int size() const { return static_cast<int>(index.size()); }
};

MergedIntervals merge_intervals(const McCloud& cloud,
                                const CandidateProfile& cand,
                                double mass_floor = 1e-14);

// Variance of the one-step-updated percentile estimate when the next
// evaluation is placed at x: law of total variance over the intervals, with
// truncated-normal moments of Z within each. A single-segment profile still
// carries the occupant line's slope contribution. Returns 0 only when x is
// degenerate (variance <= degenerate_var). Candidates are ranked by
// maximizing this.
double j_var(const GpPosterior& post, const McCloud& cloud,
             const Eigen::VectorXd& x, const CriterionOptions& opts = {});

// Assembly on a prepared profile (shared by j_var and the tests).
double j_var_from(const McCloud& cloud, const CandidateProfile& cand,
                  const MergedIntervals& iv);

// Same quantity through E[q^2] - (E[q])^2 instead of the law of total
// variance; numerically inferior, kept as an independent cross-check.
double j_var_second_moment(const McCloud& cloud, const CandidateProfile& cand,
                           const MergedIntervals& iv);

struct ProbEval {
  double value = 0.0;  // |gamma - (1 - alpha)|, ranked by minimizing
  double gamma = 0.0;  // expected fraction of integration points whose true
                       // value exceeds the updated percentile estimate
  int n_intervals = 0;
};

// One-step-ahead coverage criterion. For each integration point x_t the
// probability P(xi(x_t) >= q_{n+1}) is accumulated exactly over the Z
// intervals through bivariate normal terms; gamma averages it over t and is
// compared with the nominal 1 - alpha. The integration set defaults to the
// cloud itself; an explicit set must be built against the same posterior.
// Throws if x is degenerate.
ProbEval j_prob(const GpPosterior& post, const McCloud& cloud,
                const Eigen::VectorXd& x, const CriterionOptions& opts = {});
ProbEval j_prob(const GpPosterior& post, const McCloud& cloud,
                const McCloud& integration, const Eigen::VectorXd& x,
                const CriterionOptions& opts = {});

}  // namespace surq
