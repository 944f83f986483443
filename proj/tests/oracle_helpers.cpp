#include "oracle_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "surq/kernel.hpp"
#include "surq/rng.hpp"

namespace orc {

double ref_norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double ref_norm_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

int brute_klevel_index(const surq::LineFamily& fam, double z) {
  const int l = fam.size();
  std::vector<double> v(l);
  for (int i = 0; i < l; ++i) v[i] = fam.intercepts[i] + fam.slopes[i] * z;
  std::vector<int> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (v[a] != v[b]) return v[a] < v[b];
    return a < b;
  });
  double kth = v[order[fam.k - 1]];
  for (int i = 0; i < l; ++i)
    if (v[i] == kth) return i;
  return order[fam.k - 1];
}

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

struct BvnIntegrand {
  double k, rho, denom;
  double operator()(double x) const {
    double inner = denom > 0.0 ? ref_norm_cdf((k - rho * x) / denom)
                               : (rho * x <= k ? 1.0 : 0.0);
    return std::exp(-0.5 * x * x) * 0.39894228040143267794 * inner;
  }
};

double adaptive(const BvnIntegrand& f, double a, double b, double fa,
                double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_rule(fa, flm, fm, m - a);
  double right = simpson_rule(fm, frm, fb, b - m);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double simpson_bvn(double h, double k, double rho) {
  if (h < -8.5) return 0.0;
  if (k < -8.5 && rho > -0.999) {
    // symmetric in (h, k); put the finite-ish bound on the outer integral
    std::swap(h, k);
    if (h < -8.5) return 0.0;
  }
  BvnIntegrand f{k, rho, std::sqrt(std::max(0.0, 1.0 - rho * rho))};
  double a = -8.5, b = std::min(h, 8.5);
  if (b <= a) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = simpson_rule(fa, fm, fb, b - a);
  return adaptive(f, a, b, fa, fm, fb, whole, 1e-11, 40);
}

McTrunc mc_trunc_moments(double mu, double sigma, double lo, double hi,
                         long n_proposals, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(mu, sigma);
  long acc = 0;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (long i = 0; i < n_proposals; ++i) {
    double x = nd(gen);
    if (x > lo && x <= hi) {
      ++acc;
      s1 += x;
      s2 += x * x;
      s3 += x * x * x;
      s4 += x * x * x * x;
    }
  }
  if (acc < 100) throw std::runtime_error("mc_trunc_moments: starved");
  double n = static_cast<double>(acc);
  double m1 = s1 / n;
  double m2 = s2 / n - m1 * m1;
  // central moments for the variance's standard error
  double c3 = s3 / n - 3.0 * m1 * (s2 / n) + 2.0 * m1 * m1 * m1;
  double c4 = s4 / n - 4.0 * m1 * (s3 / n) + 6.0 * m1 * m1 * (s2 / n) -
              3.0 * m1 * m1 * m1 * m1;
  (void)c3;
  McTrunc r;
  r.mass = n / static_cast<double>(n_proposals);
  r.mean = m1;
  r.variance = m2;
  r.se_mass = std::sqrt(r.mass * (1.0 - r.mass) / n_proposals);
  r.se_mean = std::sqrt(m2 / n);
  r.se_variance = std::sqrt(std::max(0.0, c4 - m2 * m2) / n);
  r.accepted = acc;
  return r;
}

Scene random_scene(std::uint64_t seed, int n, int l, int d, double alpha,
                   surq::KernelFamily family) {
  surq::Rng rng(surq::derive_stream(seed, "scene"));
  surq::KernelParams kp;
  kp.family = family;
  kp.variance = 0.5 + 3.5 * rng.uniform();
  kp.lengthscales.resize(d);
  for (int j = 0; j < d; ++j) kp.lengthscales(j) = 0.3 + 1.2 * rng.uniform();

  surq::Design des;
  des.points.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) des.points(i, j) = rng.uniform();
  // sample path of the prior at the design, plus a linear drift
  Eigen::MatrixXd gram = surq::kernel_gram(kp, des.points);
  gram.diagonal().array() += 1e-10 * kp.variance;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  Eigen::VectorXd zdraw(n);
  for (int i = 0; i < n; ++i) zdraw(i) = rng.normal();
  des.values = llt.matrixL() * zdraw;
  for (int i = 0; i < n; ++i) des.values(i) += 0.7 * des.points(i, 0);

  Scene s;
  s.post = surq::fit_posterior(des, kp, surq::TrendModel{},
                               1e-8 * kp.variance);
  Eigen::MatrixXd cl(l, d);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < d; ++j) cl(i, j) = rng.uniform();
  s.cloud = surq::build_cloud(s.post, cl, alpha);
  return s;
}

Eigen::VectorXd pick_candidate(const Scene& s, std::uint64_t seed,
                               double min_var) {
  surq::Rng rng(surq::derive_stream(seed, "cand"));
  const int d = s.post.dim();
  for (int attempt = 0; attempt < 256; ++attempt) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x(j) = rng.uniform();
    double m, v;
    s.post.predict(x, m, v);
    if (v > min_var) return x;
  }
  throw std::runtime_error("pick_candidate: posterior everywhere degenerate");
}

McVar mc_jvar(const Scene& s, const Eigen::VectorXd& x, int draws,
              std::uint64_t seed) {
  const int l = s.cloud.size();
  double m, s2;
  s.post.predict(x, m, s2);
  double sd = std::sqrt(s2);
  Eigen::VectorXd a(l);
  for (int t = 0; t < l; ++t)
    a(t) = s.post.predict_cov(s.cloud.points.row(t).transpose(), x);

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> w(l);
  const int k = s.cloud.rank;
  double s1 = 0.0, sq2 = 0.0, sq3 = 0.0, sq4 = 0.0;
  std::vector<double> qs(draws);
  for (int i = 0; i < draws; ++i) {
    double z = nd(gen) / sd;  // Z ~ N(0, 1/s^2)
    for (int t = 0; t < l; ++t) w[t] = s.cloud.means(t) + a(t) * z;
    std::nth_element(w.begin(), w.begin() + (k - 1), w.end());
    qs[i] = w[k - 1];
    s1 += qs[i];
  }
  double mean = s1 / draws;
  for (int i = 0; i < draws; ++i) {
    double c = qs[i] - mean;
    sq2 += c * c;
    sq3 += c * c * c;
    sq4 += c * c * c * c;
  }
  double m2 = sq2 / draws, m4 = sq4 / draws;
  (void)sq3;
  McVar r;
  r.variance = m2;
  r.se = std::sqrt(std::max(0.0, m4 - m2 * m2) / draws);
  return r;
}

McProb mc_jprob(const Scene& s, const Eigen::VectorXd& x, int draws,
                std::uint64_t seed) {
  const int l = s.cloud.size();
  double m, s2;
  s.post.predict(x, m, s2);
  double sd = std::sqrt(s2);
  Eigen::VectorXd a(l), s1sq(l);
  for (int t = 0; t < l; ++t) {
    a(t) = s.post.predict_cov(s.cloud.points.row(t).transpose(), x);
    double st2 = s.cloud.stds(t) * s.cloud.stds(t);
    s1sq(t) = std::max(0.0, st2 - (a(t) / sd) * (a(t) / sd));
  }

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> w(l);
  const int k = s.cloud.rank;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    double z = nd(gen) / sd;
    for (int t = 0; t < l; ++t) w[t] = s.cloud.means(t) + a(t) * z;
    std::vector<double> ws = w;
    std::nth_element(ws.begin(), ws.begin() + (k - 1), ws.end());
    double q = ws[k - 1];
    double frac = 0.0;
    for (int t = 0; t < l; ++t) {
      if (s1sq(t) <= 0.0) {
        frac += (w[t] >= q) ? 1.0 : 0.0;  // ties count as above
      } else {
        frac += ref_norm_sf((q - w[t]) / std::sqrt(s1sq(t)));
      }
    }
    frac /= l;
    sum += frac;
    sumsq += frac * frac;
  }
  double mean = sum / draws;
  double var = std::max(0.0, sumsq / draws - mean * mean);
  McProb r;
  r.gamma = mean;
  r.se = std::sqrt(var / draws);
  return r;
}

}  // namespace orc
