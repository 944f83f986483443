#include "surq/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace surq {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935;

inline double shape(KernelFamily family, double r) {
  switch (family) {
    case KernelFamily::Matern32: {
      double t = kSqrt3 * r;
      return (1.0 + t) * std::exp(-t);
    }
    case KernelFamily::SquaredExponential:
      return std::exp(-0.5 * r * r);
  }
  return 0.0;
}
}  // namespace

void KernelParams::validate(int dim) const {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("kernel: variance must be positive and finite");
  if (lengthscales.size() != dim)
    throw std::invalid_argument("kernel: lengthscale count does not match dimension");
  for (int j = 0; j < lengthscales.size(); ++j) {
    if (!(lengthscales[j] > 0.0) || !std::isfinite(lengthscales[j]))
      throw std::invalid_argument("kernel: lengthscales must be positive and finite");
  }
}

double kernel_eval(const KernelParams& p, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  double s = 0.0;
  for (int j = 0; j < x.size(); ++j) {
    double d = (x[j] - y[j]) / p.lengthscales[j];
    s += d * d;
  }
  return p.variance * shape(p.family, std::sqrt(s));
}

Eigen::VectorXd kernel_cross(const KernelParams& p, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      double t = (X(i, j) - y[j]) / p.lengthscales[j];
      s += t * t;
    }
    out[i] = p.variance * shape(p.family, std::sqrt(s));
  }
  return out;
}

Eigen::MatrixXd kernel_gram(const KernelParams& p, const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    G(i, i) = p.variance;
    for (int j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int t = 0; t < d; ++t) {
        double u = (X(i, t) - X(j, t)) / p.lengthscales[t];
        s += u * u;
      }
      double v = p.variance * shape(p.family, std::sqrt(s));
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

int trend_size(TrendBasis basis, int dim) {
  return basis == TrendBasis::Constant ? 1 : dim + 1;
}

Eigen::VectorXd trend_features(TrendBasis basis, const Eigen::VectorXd& x) {
  if (basis == TrendBasis::Constant) {
    Eigen::VectorXd f(1);
    f[0] = 1.0;
    return f;
  }
  Eigen::VectorXd f(x.size() + 1);
  f[0] = 1.0;
  f.tail(x.size()) = x;
  return f;
}

Eigen::MatrixXd trend_matrix(TrendBasis basis, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd F(X.rows(), trend_size(basis, static_cast<int>(X.cols())));
  F.col(0).setOnes();
  if (basis == TrendBasis::Linear) F.rightCols(X.cols()) = X;
  return F;
}

}  // namespace surq
