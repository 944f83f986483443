#pragma once

#include <Eigen/Dense>

namespace surq {

enum class KernelFamily { Matern32, SquaredExponential };

struct KernelParams {
  double variance = 1.0;
  Eigen::VectorXd lengthscales;  // one per input dimension
  KernelFamily family = KernelFamily::Matern32;

  void validate(int dim) const;  // throws on non-finite/non-positive entries
};

// Stationary covariance c(x, y) under params.
double kernel_eval(const KernelParams& p, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// c(rows of X, y) as a vector.
Eigen::VectorXd kernel_cross(const KernelParams& p, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y);

// Symmetric Gram matrix of the rows of X.
Eigen::MatrixXd kernel_gram(const KernelParams& p, const Eigen::MatrixXd& X);

enum class TrendBasis { Constant, Linear };

int trend_size(TrendBasis basis, int dim);

// Regression features of a point: [1] or [1, x_1..x_d].
Eigen::VectorXd trend_features(TrendBasis basis, const Eigen::VectorXd& x);

// Feature matrix for the rows of X (n x p).
Eigen::MatrixXd trend_matrix(TrendBasis basis, const Eigen::MatrixXd& X);

}  // namespace surq
