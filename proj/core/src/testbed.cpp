#include "surq/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "surq/percentile.hpp"

namespace surq {

namespace {
constexpr double kPi = 3.1415926535897932385;
}

TestFunction custom_function(std::string name, int dim,
                             std::function<double(const Eigen::VectorXd&)> fn) {
  TestFunction f;
  f.name = std::move(name);
  f.dim = dim;
  f.fn = std::move(fn);
  return f;
}

TestFunction branin2() {
  return custom_function("branin2", 2, [](const Eigen::VectorXd& x) {
    double x1 = 15.0 * x[0] - 5.0;
    double x2 = 15.0 * x[1];
    double u = x2 - 5.1 * x1 * x1 / (4.0 * kPi * kPi) + 5.0 * x1 / kPi - 6.0;
    return u * u + (10.0 - 10.0 / (8.0 * kPi)) * std::cos(x1) + 10.0;
  });
}

TestFunction hartman4() {
  // Rows index the coordinate, columns the exponential term.
  static const double A[4][4] = {{10.0, 0.05, 3.0, 17.0},
                                 {3.0, 10.0, 3.5, 8.0},
                                 {17.0, 17.0, 1.7, 0.05},
                                 {3.5, 0.1, 10.0, 10.0}};
  static const double P[4][4] = {{0.1312, 0.2329, 0.2348, 0.4047},
                                 {0.1696, 0.4135, 0.1451, 0.8828},
                                 {0.5569, 0.8307, 0.3522, 0.8732},
                                 {0.0124, 0.3736, 0.2883, 0.5743}};
  static const double C[4] = {1.0, 1.2, 3.0, 3.2};
  return custom_function("hartman4", 4, [](const Eigen::VectorXd& x) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      double d = 0.0;
      for (int j = 0; j < 4; ++j) {
        double t = x[j] - P[j][i];
        d += A[j][i] * t * t;
      }
      sum += C[i] * std::exp(-d);
    }
    return -(2.58 + sum) / 1.94;
  });
}

namespace {

double ackley_terms(const Eigen::VectorXd& x, int terms) {
  double sq = 0.0, cs = 0.0;
  for (int i = 0; i < terms; ++i) {
    sq += x[i] * x[i];
    cs += std::cos(2.0 * kPi * x[i]);
  }
  double inv = 1.0 / terms;
  return 20.0 + std::exp(1.0) - 20.0 * std::exp(-0.2 * std::sqrt(inv * sq)) -
         std::exp(inv * cs);
}

}  // namespace

TestFunction ackley(int dim) {
  if (dim < 1) throw std::invalid_argument("ackley: dim must be positive");
  return custom_function("ackley" + std::to_string(dim), dim,
                         [dim](const Eigen::VectorXd& x) {
                           return ackley_terms(x, dim);
                         });
}

TestFunction ackley_first4(int dim) {
  if (dim < 4) throw std::invalid_argument("ackley_first4: dim must be >= 4");
  return custom_function("ackley_first4_" + std::to_string(dim), dim,
                         [](const Eigen::VectorXd& x) {
                           return ackley_terms(x, 4);
                         });
}

UniformBox unit_box(int dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

GaussianInput make_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size())
    throw std::invalid_argument("gaussian input: shape mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("gaussian input: covariance not positive definite");
  GaussianInput g;
  g.mean = std::move(mean);
  g.chol = llt.matrixL();
  g.cov = std::move(cov);
  return g;
}

int input_dim(const InputDistribution& dist) {
  if (const auto* b = std::get_if<UniformBox>(&dist))
    return static_cast<int>(b->lo.size());
  return static_cast<int>(std::get<GaussianInput>(dist).mean.size());
}

Eigen::VectorXd input_scale(const InputDistribution& dist) {
  if (const auto* b = std::get_if<UniformBox>(&dist)) return b->hi - b->lo;
  return std::get<GaussianInput>(dist).cov.diagonal().array().sqrt();
}

Eigen::MatrixXd sample_inputs(const InputDistribution& dist, int n, Rng& rng) {
  const int d = input_dim(dist);
  Eigen::MatrixXd X(n, d);
  if (const auto* b = std::get_if<UniformBox>(&dist)) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j)
        X(i, j) = b->lo[j] + rng.uniform() * (b->hi[j] - b->lo[j]);
  } else {
    const auto& g = std::get<GaussianInput>(dist);
    Eigen::VectorXd z(d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) z[j] = rng.normal();
      X.row(i) = (g.mean + g.chol * z).transpose();
    }
  }
  return X;
}

Eigen::MatrixXd lhs_design(const InputDistribution& dist, int n, Rng& rng) {
  const int d = input_dim(dist);
  Eigen::MatrixXd U(n, d);
  std::vector<int> perm(n);
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(i + 1)]);
    for (int i = 0; i < n; ++i)
      U(i, j) = (perm[i] + rng.uniform()) / n;
  }
  if (const auto* b = std::get_if<UniformBox>(&dist)) {
    for (int j = 0; j < d; ++j)
      U.col(j) = (b->lo[j] + (b->hi[j] - b->lo[j]) * U.col(j).array()).matrix();
    return U;
  }
  const auto& g = std::get<GaussianInput>(dist);
  for (int j = 0; j < d; ++j) {
    double sd = std::sqrt(g.cov(j, j));
    for (int i = 0; i < n; ++i)
      U(i, j) = g.mean[j] + sd * norm_quantile(U(i, j));
  }
  return U;
}

OraclePercentile oracle_percentile(const TestFunction& fn,
                                   const InputDistribution& dist, double alpha,
                                   int n, std::uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("oracle: sample too small");
  Rng rng(seed);
  Eigen::MatrixXd X = sample_inputs(dist, n, rng);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = fn.fn(X.row(i).transpose());
  std::sort(v.begin(), v.end());

  auto at_rank = [&](int k) { return v[std::clamp(k, 1, n) - 1]; };
  int k = percentile_rank(n, alpha);
  int half = static_cast<int>(std::ceil(3.0 * std::sqrt(n * alpha * (1.0 - alpha))));

  OraclePercentile o;
  o.value = at_rank(k);
  o.band_lo = at_rank(k - half);
  o.band_hi = at_rank(k + half);
  o.spread = at_rank(percentile_rank(n, 0.995)) - at_rank(percentile_rank(n, 0.005));
  o.n = n;
  return o;
}

double error_percent(double estimate, const OraclePercentile& oracle) {
  return 100.0 * std::fabs(estimate - oracle.value) / oracle.spread;
}

}  // namespace surq
