#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "surq/rng.hpp"

namespace surq {

// Expensive-to-evaluate target with a shared evaluation counter so budgets
// can be audited after a run.
struct TestFunction {
  std::string name;
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> fn;
  std::shared_ptr<std::atomic<long>> evaluations =
      std::make_shared<std::atomic<long>>(0);

  double operator()(const Eigen::VectorXd& x) const {
    ++*evaluations;
    return fn(x);
  }
};

TestFunction branin2();
TestFunction hartman4();
// Standard Ackley in d dimensions (value 0 at the origin).
TestFunction ackley(int dim);
// Variant that only involves the first four coordinates, with the 1/4
// normalization kept, as an alternative low-effective-dimension target.
TestFunction ackley_first4(int dim);
TestFunction custom_function(std::string name, int dim,
                             std::function<double(const Eigen::VectorXd&)> fn);

struct UniformBox {
  Eigen::VectorXd lo, hi;
};
UniformBox unit_box(int dim);

struct GaussianInput {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd chol;  // lower factor of cov, filled by make_gaussian
};
GaussianInput make_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);

using InputDistribution = std::variant<UniformBox, GaussianInput>;

int input_dim(const InputDistribution& dist);
// Per-dimension scale: box width, or marginal standard deviation.
Eigen::VectorXd input_scale(const InputDistribution& dist);

// i.i.d. draws from the input distribution, one row per point.
Eigen::MatrixXd sample_inputs(const InputDistribution& dist, int n, Rng& rng);

// Latin hypercube: stratified uniforms per dimension under independent
// permutations, pushed through the marginal inverse CDFs. For Gaussian
// inputs the correlation structure is not imposed on the design; the design
// targets coverage, while probability statements use sample_inputs.
Eigen::MatrixXd lhs_design(const InputDistribution& dist, int n, Rng& rng);

struct OraclePercentile {
  double value = 0.0;
  double band_lo = 0.0, band_hi = 0.0;  // order-statistic uncertainty band
  double spread = 0.0;  // 99.5th minus 0.5th percentile of g, for the metric
  int n = 0;
};

// Brute-force reference percentile from n direct evaluations of g; the band
// spans ranks k -+ ceil(3 sqrt(n alpha (1 - alpha))). Evaluations made here
// bypass the budget counter.
OraclePercentile oracle_percentile(const TestFunction& fn,
                                   const InputDistribution& dist, double alpha,
                                   int n, std::uint64_t seed);

// 100 |estimate - reference| / spread.
double error_percent(double estimate, const OraclePercentile& oracle);

}  // namespace surq
