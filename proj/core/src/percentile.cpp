#include "surq/percentile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "surq/kernel.hpp"

namespace surq {

int percentile_rank(int l, double alpha) {
  if (l < 1) throw std::invalid_argument("percentile: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("percentile: alpha must be in (0, 1)");
  int k = static_cast<int>(std::floor(l * alpha)) + 1;
  return std::min(k, l);
}

PercentileResult empirical_percentile(const Eigen::VectorXd& values,
                                      double alpha) {
  const int l = static_cast<int>(values.size());
  int k = percentile_rank(l, alpha);
  if (!values.allFinite())
    throw std::invalid_argument("percentile: non-finite values");

  std::vector<double> work(values.data(), values.data() + l);
  std::nth_element(work.begin(), work.begin() + (k - 1), work.end());
  double v = work[k - 1];
  for (int i = 0; i < l; ++i) {
    if (values[i] == v) return {v, i, k};
  }
  return {v, -1, k};  // unreachable: v is one of the entries
}

McCloud build_cloud(const GpPosterior& post, const Eigen::MatrixXd& points,
                    double alpha) {
  if (points.rows() < 2)
    throw std::invalid_argument("cloud: need at least two points");
  if (points.cols() != post.dim())
    throw std::invalid_argument("cloud: dimension mismatch with posterior");

  McCloud cloud;
  cloud.points = points;
  cloud.alpha = alpha;
  cloud.posterior_size = post.size();

  Eigen::VectorXd vars;
  post.predict_batch(points, cloud.means, vars, &cloud.half);
  cloud.stds = vars.array().sqrt();
  cloud.estimate = empirical_percentile(cloud.means, alpha);
  cloud.rank = cloud.estimate.rank;
  return cloud;
}

CandidateProfile klevel_for_candidate(const GpPosterior& post,
                                      const McCloud& cloud,
                                      const Eigen::VectorXd& x,
                                      double window_sds, bool direct) {
  if (cloud.posterior_size != post.size())
    throw std::invalid_argument("candidate: cloud built for another posterior");

  CandidateProfile cand;
  cand.x = x;
  post.predict(x, cand.mean, cand.s2);
  if (cand.s2 <= 1e-12)
    throw std::invalid_argument(
        "candidate: posterior variance at x is degenerate");

  cand.half = post.half_vec(x);
  cand.slopes = kernel_cross(post.kernel(), cloud.points, x) -
                cloud.half.transpose() * cand.half;

  double z_half = window_sds / std::sqrt(cand.s2);  // sd(Z) = 1 / s_n(x)
  cand.z_lo = -z_half;
  cand.z_hi = z_half;
  LineFamily fam;
  fam.slopes = cand.slopes;
  fam.intercepts = cloud.means;
  fam.k = cloud.rank;
  cand.profile = direct ? compute_klevel_direct(fam, -z_half, z_half)
                        : compute_klevel(fam, -z_half, z_half);
  return cand;
}

PercentileResult updated_percentile(const McCloud& cloud,
                                    const CandidateProfile& cand,
                                    double g_new) {
  double z = (g_new - cand.mean) / cand.s2;
  int j = cand.profile.index_at(z);
  return {cloud.means[j] + cand.slopes[j] * z, j, cloud.rank};
}

}  // namespace surq
