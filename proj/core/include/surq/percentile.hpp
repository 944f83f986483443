#pragma once

#include <Eigen/Dense>

#include "surq/gp.hpp"
#include "surq/klevel.hpp"

namespace surq {

struct PercentileResult {
  double value = 0.0;
  int index = -1;  // smallest original index attaining the value
  int rank = 0;    // 1-based order-statistic rank used
};

// Rank of the alpha-percentile among l values: floor(l * alpha) + 1,
// capped at l. alpha must lie strictly inside (0, 1).
int percentile_rank(int l, double alpha);

// The rank-th smallest entry; ties resolve to the smallest original index.
PercentileResult empirical_percentile(const Eigen::VectorXd& values,
                                      double alpha);

// Monte Carlo cloud together with everything the infill criteria reuse for
// one posterior: predictions at the cloud points, the shared triangular
// half-solve against the design, and the current percentile estimate.
struct McCloud {
  Eigen::MatrixXd points;  // l x d
  double alpha = 0.5;
  int rank = 1;
  Eigen::VectorXd means;  // m_n at the cloud
  Eigen::VectorXd stds;   // s_n at the cloud
  Eigen::MatrixXd half;   // L^{-1} C(X_n, cloud), n x l
  PercentileResult estimate{};
  int posterior_size = 0;

  int size() const { return static_cast<int>(points.rows()); }
};

McCloud build_cloud(const GpPosterior& post, const Eigen::MatrixXd& points,
                    double alpha);

// Conditioning on a value g at a candidate x moves every cloud mean along a
// line in z = (g - m_n(x)) / s_n^2(x): new mean at x_t = means[t] +
// slopes[t] * z, with slope k_n(x_t, x). The profile tracks which cloud
// point carries the percentile rank as z varies.
struct CandidateProfile {
  Eigen::VectorXd x;
  double mean = 0.0;       // m_n(x)
  double s2 = 0.0;         // s_n^2(x)
  Eigen::VectorXd half;    // L^{-1} c_n(x)
  Eigen::VectorXd slopes;  // k_n(x_t, x) over the cloud
  KLevelProfile profile;
  double z_lo = 0.0, z_hi = 0.0;  // window the profile was built on
};

// window_sds limits the profile to that many standard deviations of
// Z ~ N(0, 1 / s_n^2(x)) around zero; pass +inf for the full profile.
// `direct` selects the breakpoint walk over the plane sweep (identical
// output). Throws if the candidate's posterior variance is degenerate.
CandidateProfile klevel_for_candidate(
    const GpPosterior& post, const McCloud& cloud, const Eigen::VectorXd& x,
    double window_sds = std::numeric_limits<double>::infinity(),
    bool direct = true);

// Percentile of the cloud means conditioned on observing g at the candidate,
// read off the profile. Matches recomputing the updated means and selecting
// the rank-th smallest, bit for bit. Requires a full-range profile.
PercentileResult updated_percentile(const McCloud& cloud,
                                    const CandidateProfile& cand,
                                    double g_new);

}  // namespace surq
