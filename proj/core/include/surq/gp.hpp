#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "surq/kernel.hpp"

namespace surq {

struct Design {
  Eigen::MatrixXd points;  // n x d
  Eigen::VectorXd values;  // n

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }

  // Throws on shape mismatch, non-finite entries, or rows closer than
  // 1e-12 relative to the coordinate scale.
  void validate() const;

  Design appended(const Eigen::VectorXd& x, double g) const;
};

struct TrendModel {
  TrendBasis basis = TrendBasis::Constant;
  Eigen::VectorXd beta;  // empty means "estimate by GLS during fitting"

  bool fitted() const { return beta.size() > 0; }
};

// Gaussian-process posterior conditioned on a design, with a plug-in trend.
// Immutable after construction; all accessors are safe to call concurrently.
class GpPosterior {
 public:
  GpPosterior() = default;

  int size() const { return design_.size(); }
  int dim() const { return design_.dim(); }
  const Design& design() const { return design_; }
  const KernelParams& kernel() const { return kernel_; }
  const TrendModel& trend() const { return trend_; }
  double nugget() const { return nugget_; }

  double trend_value(const Eigen::VectorXd& x) const;

  // Posterior mean m_n(x) and variance s_n^2(x); the variance is clamped to
  // [0, prior variance].
  void predict(const Eigen::VectorXd& x, double& mean, double& var) const;
  double predict_mean(const Eigen::VectorXd& x) const;

  // Posterior covariance k_n(x, y).
  double predict_cov(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  // Batched prediction over the rows of P. When half_out is non-null it
  // receives L^{-1} C(X_n, rows of P), saving callers that also need the
  // posterior covariance against P a second solve.
  void predict_batch(const Eigen::MatrixXd& P, Eigen::VectorXd& means,
                     Eigen::VectorXd& vars,
                     Eigen::MatrixXd* half_out = nullptr) const;

  // L^{-1} c_n(x): the half-solve both prediction formulas share.
  Eigen::VectorXd half_vec(const Eigen::VectorXd& x) const;

  // L^{-1} C(X_n, rows of P), one column per row of P.
  Eigen::MatrixXd half_cross(const Eigen::MatrixXd& P) const;

  friend GpPosterior fit_posterior(const Design&, const KernelParams&,
                                   const TrendModel&, double);
  friend GpPosterior update_posterior(const GpPosterior&,
                                      const Eigen::VectorXd&, double);

 private:
  Design design_;
  KernelParams kernel_;
  TrendModel trend_;
  double nugget_ = 0.0;
  Eigen::MatrixXd chol_;   // lower Cholesky factor of C_n + nugget I
  Eigen::VectorXd alpha_;  // (C_n + nugget I)^{-1} (g - F beta)
};

// Conditions the prior on the design. An unfitted trend is estimated by
// generalized least squares; a fitted one is used as given. nugget is the
// absolute value added to the Gram diagonal (callers usually pass
// 1e-8 * prior variance). Throws on factorization failure with a hint to
// raise the nugget.
GpPosterior fit_posterior(const Design& design, const KernelParams& kernel,
                          const TrendModel& trend, double nugget);

// One-step conditioning on (x_new, g_new) with every hyperparameter frozen,
// via rank-one extension of the Cholesky factor. Agrees with fit_posterior
// on the extended design. Throws if x_new duplicates a design point or its
// posterior variance is degenerate (<= 1e-12).
GpPosterior update_posterior(const GpPosterior& post,
                             const Eigen::VectorXd& x_new, double g_new);

struct FitOptions {
  int n_starts = 10;
  double ls_lower = 1e-2;   // in units of the per-dimension design range
  double ls_upper = 10.0;
  double rel_nugget = 1e-8;
  double var_floor = 1e-12;
  std::uint64_t seed = 0x5eed5eedULL;
  std::optional<Eigen::VectorXd> hint;  // lengthscales of a previous fit
};

// Concentrated (profile) log-likelihood of the lengthscales: the GLS trend
// and the ML variance are closed-form. Returns the log-likelihood; fills
// sigma2_out with the profiled variance when non-null. Throws if the
// correlation matrix cannot be factorized.
double profile_loglik(const Design& design, KernelFamily family,
                      TrendBasis basis, const Eigen::VectorXd& lengthscales,
                      double rel_nugget, double* sigma2_out = nullptr);

// Multi-start maximum-likelihood estimate of the kernel hyperparameters.
// Starts are log-uniform over the lengthscale bounds (plus the hint, when
// given, as the first start). Throws only if every start fails to factorize.
KernelParams fit_hyperparameters(const Design& design, KernelFamily family,
                                 TrendBasis basis,
                                 const FitOptions& opts = FitOptions{});

}  // namespace surq
