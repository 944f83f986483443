#include "surq/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "surq/kernel.hpp"
#include "surq/special_functions.hpp"

namespace surq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double line_value(double a, double b, double z) {
  if (std::isinf(z)) {
    if (a == 0.0) return b;
    return (a > 0.0) == (z > 0.0) ? kInf : -kInf;
  }
  return b + a * z;
}

}  // namespace

MergedIntervals merge_intervals(const McCloud& cloud,
                                const CandidateProfile& cand,
                                double mass_floor) {
  const double s = std::sqrt(cand.s2);
  const auto& bp = cand.profile.breakpoints;
  const auto& seg = cand.profile.segment_index;
  const int nb = static_cast<int>(bp.size());

  std::vector<double> cdf(nb);
  for (int j = 0; j < nb; ++j) cdf[j] = norm_cdf(s * bp[j]);

  MergedIntervals out;
  std::vector<double> group_best;  // heaviest constituent per emitted group
  double lo_cdf = 0.0;
  double best_mass = -1.0;
  int best_idx = -1;
  for (int j = 0; j <= nb; ++j) {
    double hi_cdf = (j == nb) ? 1.0 : cdf[j];
    double mass = hi_cdf - (j == 0 ? 0.0 : cdf[j - 1]);
    if (mass > best_mass) {
      best_mass = mass;
      best_idx = seg[j];
    }
    if (j < nb && hi_cdf - lo_cdf >= mass_floor) {
      out.index.push_back(best_idx);
      out.prob.push_back(hi_cdf - lo_cdf);
      out.z_edges.push_back(bp[j]);
      out.f_edges.push_back(s * bp[j]);
      out.edge_cdf.push_back(hi_cdf);
      group_best.push_back(best_mass);
      lo_cdf = hi_cdf;
      best_mass = -1.0;
      best_idx = -1;
    }
  }
  double tail = 1.0 - lo_cdf;
  if (tail < mass_floor && !out.index.empty()) {
    // Fold the light tail group into its predecessor.
    int last = static_cast<int>(out.index.size()) - 1;
    if (best_mass > group_best[last]) out.index[last] = best_idx;
    out.prob[last] += tail;
    out.z_edges.pop_back();
    out.f_edges.pop_back();
    out.edge_cdf.pop_back();
  } else {
    out.index.push_back(best_idx);
    out.prob.push_back(tail);
  }

  // Range of the updated percentile across the window, for early exits.
  out.q_lo = kInf;
  out.q_hi = -kInf;
  const int m = out.size();
  for (int i = 0; i < m; ++i) {
    double a = cand.slopes[out.index[i]];
    double b = cloud.means[out.index[i]];
    double za = (i == 0) ? cand.z_lo : out.z_edges[i - 1];
    double zb = (i == m - 1) ? cand.z_hi : out.z_edges[i];
    double va = line_value(a, b, za);
    double vb = line_value(a, b, zb);
    out.q_lo = std::min(out.q_lo, std::min(va, vb));
    out.q_hi = std::max(out.q_hi, std::max(va, vb));
  }
  return out;
}

double j_var_from(const McCloud& cloud, const CandidateProfile& cand,
                  const MergedIntervals& iv) {
  const int m = iv.size();
  if (m < 1) return 0.0;
  const double s = std::sqrt(cand.s2);

  std::vector<double> phi(m - 1), fphi(m - 1);
  for (int j = 0; j + 1 < m; ++j) {
    phi[j] = norm_pdf(iv.f_edges[j]);
    fphi[j] = iv.f_edges[j] * phi[j];
  }

  std::vector<double> M(m), within(m);
  double mean = 0.0;
  for (int i = 0; i < m; ++i) {
    double P = iv.prob[i];
    double phi_lo = (i == 0) ? 0.0 : phi[i - 1];
    double phi_hi = (i == m - 1) ? 0.0 : phi[i];
    double fphi_lo = (i == 0) ? 0.0 : fphi[i - 1];
    double fphi_hi = (i == m - 1) ? 0.0 : fphi[i];
    double mu_u = (phi_lo - phi_hi) / P;
    double e2_u = 1.0 + (fphi_lo - fphi_hi) / P;
    double var_u = std::clamp(e2_u - mu_u * mu_u, 0.0, 1.0);
    double a = cand.slopes[iv.index[i]];
    M[i] = cloud.means[iv.index[i]] + a * mu_u / s;
    within[i] = (a / s) * (a / s) * var_u;
    mean += P * M[i];
  }
  double var = 0.0;
  for (int i = 0; i < m; ++i)
    var += iv.prob[i] * (within[i] + (M[i] - mean) * (M[i] - mean));
  return var;
}

double j_var_second_moment(const McCloud& cloud, const CandidateProfile& cand,
                           const MergedIntervals& iv) {
  const int m = iv.size();
  if (m < 1) return 0.0;
  const double s = std::sqrt(cand.s2);

  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < m; ++i) {
    double P = iv.prob[i];
    double f_lo = (i == 0) ? -kInf : iv.f_edges[i - 1];
    double f_hi = (i == m - 1) ? kInf : iv.f_edges[i];
    double phi_lo = std::isinf(f_lo) ? 0.0 : norm_pdf(f_lo);
    double phi_hi = std::isinf(f_hi) ? 0.0 : norm_pdf(f_hi);
    double fphi_lo = std::isinf(f_lo) ? 0.0 : f_lo * phi_lo;
    double fphi_hi = std::isinf(f_hi) ? 0.0 : f_hi * phi_hi;
    double mu_z = (phi_lo - phi_hi) / P / s;
    double e2_z = (1.0 + (fphi_lo - fphi_hi) / P) / (s * s);
    double a = cand.slopes[iv.index[i]];
    double b = cloud.means[iv.index[i]];
    e1 += P * (b + a * mu_z);
    e2 += P * (b * b + 2.0 * b * a * mu_z + a * a * e2_z);
  }
  return e2 - e1 * e1;
}

double j_var(const GpPosterior& post, const McCloud& cloud,
             const Eigen::VectorXd& x, const CriterionOptions& opts) {
  double mean, var;
  post.predict(x, mean, var);
  if (var <= opts.degenerate_var) return 0.0;
  CandidateProfile cand = klevel_for_candidate(post, cloud, x, opts.window_sds,
                                               opts.direct_klevel);
  MergedIntervals iv = merge_intervals(cloud, cand, opts.mass_floor);
  return j_var_from(cloud, cand, iv);
}

namespace {

// P(xi_t >= q_{n+1}) accumulated over the Z intervals for every integration
// point, via bivariate normal rectangles in (xi_t - a_q Z, sZ).
//
// The occupant means spread over the whole response range while a given
// integration point only straddles intervals whose mean lies within 8.3
// conditional widths of m_t: below that band the rectangle holds the full
// interval mass, above it nothing (the same verdicts the per-interval pe
// guards reach, each off by < 1e-16). Ordering intervals by occupant mean
// once per candidate turns all out-of-band work into two binary searches
// and a prefix-sum lookup.
ProbEval assemble_prob(const McCloud& cloud, const CandidateProfile& cand,
                       const MergedIntervals& iv, const Eigen::VectorXd& m_t,
                       const Eigen::VectorXd& s_t, const Eigen::VectorXd& u_t,
                       double alpha) {
  const double s = std::sqrt(cand.s2);
  const int T = static_cast<int>(m_t.size());
  const int m = iv.size();

  std::vector<double> gq(m), mq(m);
  double gq_max = 0.0;
  for (int i = 0; i < m; ++i) {
    gq[i] = cand.slopes[iv.index[i]] / s;
    mq[i] = cloud.means[iv.index[i]];
    gq_max = std::max(gq_max, std::fabs(gq[i]));
  }
  std::vector<int> by_mean(m);
  std::iota(by_mean.begin(), by_mean.end(), 0);
  std::sort(by_mean.begin(), by_mean.end(), [&](int a, int b) {
    if (mq[a] != mq[b]) return mq[a] < mq[b];
    return a < b;
  });
  // Prefix masses in mean order, skipping the same dust intervals the band
  // loop skips so both paths agree on what counts.
  std::vector<double> mean_sorted(m), below_mass(m + 1, 0.0);
  for (int p = 0; p < m; ++p) {
    mean_sorted[p] = mq[by_mean[p]];
    double P = iv.prob[by_mean[p]];
    below_mass[p + 1] = below_mass[p] + (P < 1e-13 ? 0.0 : P);
  }

  constexpr double kBandSds = 8.3;  // Phi(-8.3) ~ 5e-17, under the pe cutoffs

  double gamma_sum = 0.0;
  for (int t = 0; t < T; ++t) {
    double mt = m_t[t], st = s_t[t], ut = u_t[t];

    // The updated percentile stays inside [q_lo, q_hi] (up to the mass
    // outside the window), so points far above or below it resolve with a
    // single marginal CDF.
    double lo_b, hi_b;
    if (st > 0.0) {
      lo_b = norm_cdf((mt - iv.q_hi) / st);
      hi_b = norm_cdf((mt - iv.q_lo) / st);
    } else {
      lo_b = mt >= iv.q_hi ? 1.0 : 0.0;
      hi_b = mt >= iv.q_lo ? 1.0 : 0.0;
    }
    if (lo_b >= 1.0 - 1e-14) {
      gamma_sum += 1.0;
      continue;
    }
    if (hi_b <= 1e-14) continue;

    double resid_var = std::max(st * st - ut * ut, 0.0);
    // sw2 <= band_sw2 for every interval, so the band is conservative. When
    // it collapses to a point (all gaps degenerate) the cuts below reduce to
    // the tie-counts-as-above rule: means <= mt land in the prefix.
    double band_sw =
        std::sqrt(resid_var + (gq_max + std::fabs(ut)) * (gq_max + std::fabs(ut)));
    auto lo_it = std::upper_bound(mean_sorted.begin(), mean_sorted.end(),
                                  mt - kBandSds * band_sw);
    auto hi_it = std::lower_bound(lo_it, mean_sorted.end(),
                                  mt + kBandSds * band_sw);
    int p_lo = static_cast<int>(lo_it - mean_sorted.begin());
    int p_hi = static_cast<int>(hi_it - mean_sorted.begin());

    double gt = below_mass[p_lo];
    // A line occupying several intervals sorts them adjacently (equal
    // means), so its threshold, correlation, and node table carry over.
    int cached = -1;
    int act = 0;  // 1 skip, 2 add mass, 3 tie rule, 4 lone interval, 5 quad
    double e = 0.0, pe = 0.0, r = 0.0;
    BvnAngular ang;
    for (int p = p_lo; p < p_hi; ++p) {
      int i = by_mean[p];
      double P = iv.prob[i];
      if (P < 1e-13) continue;
      if (iv.index[i] != cached) {
        cached = iv.index[i];
        double sw2 = resid_var + (gq[i] - ut) * (gq[i] - ut);
        if (sw2 < 1e-300) {
          act = 3;
        } else {
          double sw = std::sqrt(sw2);
          e = (mt - mq[i]) / sw;
          pe = norm_cdf(e);
          if (pe <= 1e-16) {
            act = 1;
          } else if (pe >= 1.0 - 1e-16) {
            act = 2;
          } else if (m == 1) {
            act = 4;
          } else {
            act = 5;
            r = std::clamp((gq[i] - ut) / sw, -1.0, 1.0);
            bvn_angular_prepare(r, ang);
          }
        }
      }
      if (act == 1) continue;
      if (act == 2) {
        gt += P;
        continue;
      }
      if (act == 3) {
        if (mt >= mq[i]) gt += P;  // degenerate gap; ties count as above
        continue;
      }
      if (act == 4) {
        gt += pe;
        continue;
      }
      double term;
      if (i == 0)
        term = bvn_cdf(e, iv.f_edges[0], r);
      else if (i == m - 1)
        term = bvn_cdf(e, -iv.f_edges[m - 2], -r);
      else
        term = bvn_cdf_interval(ang, e, iv.f_edges[i - 1], iv.f_edges[i], pe,
                                iv.edge_cdf[i - 1], iv.edge_cdf[i]);
      gt += std::max(term, 0.0);
    }
    gamma_sum += std::clamp(gt, 0.0, 1.0);
  }

  ProbEval out;
  out.gamma = gamma_sum / T;
  out.value = std::fabs(out.gamma - (1.0 - alpha));
  out.n_intervals = m;
  return out;
}

}  // namespace

ProbEval j_prob(const GpPosterior& post, const McCloud& cloud,
                const Eigen::VectorXd& x, const CriterionOptions& opts) {
  double mean, var;
  post.predict(x, mean, var);
  if (var <= opts.degenerate_var)
    throw std::invalid_argument("j_prob: candidate variance is degenerate");
  CandidateProfile cand = klevel_for_candidate(post, cloud, x, opts.window_sds,
                                               opts.direct_klevel);
  MergedIntervals iv = merge_intervals(cloud, cand, opts.mass_floor);
  Eigen::VectorXd u = cand.slopes / std::sqrt(cand.s2);
  return assemble_prob(cloud, cand, iv, cloud.means, cloud.stds, u,
                       cloud.alpha);
}

ProbEval j_prob(const GpPosterior& post, const McCloud& cloud,
                const McCloud& integration, const Eigen::VectorXd& x,
                const CriterionOptions& opts) {
  if (integration.posterior_size != post.size())
    throw std::invalid_argument(
        "j_prob: integration set built for another posterior");
  double mean, var;
  post.predict(x, mean, var);
  if (var <= opts.degenerate_var)
    throw std::invalid_argument("j_prob: candidate variance is degenerate");
  CandidateProfile cand = klevel_for_candidate(post, cloud, x, opts.window_sds,
                                               opts.direct_klevel);
  MergedIntervals iv = merge_intervals(cloud, cand, opts.mass_floor);
  Eigen::VectorXd a_int =
      kernel_cross(post.kernel(), integration.points, x) -
      integration.half.transpose() * cand.half;
  Eigen::VectorXd u = a_int / std::sqrt(cand.s2);
  return assemble_prob(cloud, cand, iv, integration.means, integration.stds, u,
                       cloud.alpha);
}

}  // namespace surq
