#pragma once

#include <Eigen/Core>

namespace surq {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF, absolute error below 1e-12 on [-8, 8] and monotone
// over the whole line. Accepts +-infinity.
double norm_cdf(double x);

// Inverse of norm_cdf for p in (0, 1). p = 0 or 1 map to -+infinity.
double norm_quantile(double p);

// P(X <= h, Y <= k) for a standard bivariate normal couple with correlation
// rho. h and k may be +-infinity; |rho| may not exceed 1 + 1e-9 (clamped).
double bvn_cdf(double h, double k, double rho);

// Angular quadrature state for one correlation, reusable across many
// interval probabilities at that correlation (the node sines depend only on
// rho). fast is false outside |rho| < 0.925, where evaluation falls back to
// plain bvn_cdf pairs. Unaligned storage keeps the layout independent of the
// vector ISA the including translation unit was built for.
struct BvnAngular {
  using Nodes = Eigen::Array<double, 20, 1, Eigen::DontAlign>;
  double rho = 0.0;
  double asr = 0.0;
  int n2 = 0;  // active nodes over both half-ranges
  bool fast = false;
  Nodes sn;       // sine of the node angles
  Nodes inv_omc;  // 1 / cos^2 of the node angles
  Nodes wt;       // zero beyond n2, so padded lanes drop out of the sum
};

// Fills `out` for the given correlation; cheap enough to call per distinct
// correlation inside a hot loop.
void bvn_angular_prepare(double rho, BvnAngular& out);

// P(X <= e, f_lo < Y <= f_hi) = bvn_cdf(e, f_hi, rho) - bvn_cdf(e, f_lo, rho)
// evaluated in one quadrature pass. The caller passes the marginals it
// already holds: p_e = Phi(e), p_lo/p_hi = Phi(f_lo)/Phi(f_hi). e and
// f_lo < f_hi finite.
double bvn_cdf_interval(const BvnAngular& ang, double e, double f_lo,
                        double f_hi, double p_e, double p_lo, double p_hi);

struct TruncMoments {
  double mass;      // P(lo < X <= hi)
  double mean;      // E[X | lo < X <= hi]
  double variance;  // Var[X | lo < X <= hi], never above sigma^2
};

// Moments of N(mu, sigma^2) truncated to (lo, hi). Bounds may be infinite.
// Throws if the interval mass underflows (below ~1e-300): the conditional
// moments are meaningless there and callers are expected to have merged such
// intervals away.
TruncMoments trunc_norm_moments(double mu, double sigma, double lo, double hi);

}  // namespace surq
