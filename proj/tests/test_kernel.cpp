#include <doctest.h>

#include <Eigen/Dense>

#include "surq/kernel.hpp"

using namespace surq;

namespace {

KernelParams spot_params(KernelFamily fam) {
  KernelParams p;
  p.variance = 2.0;
  p.lengthscales = Eigen::Vector2d(1.0, 2.0);
  p.family = fam;
  return p;
}

}  // namespace

TEST_CASE("kernel spot values") {
  Eigen::Vector2d x(1.0, 2.0), y(0.0, 0.0);
  CHECK(kernel_eval(spot_params(KernelFamily::Matern32), x, y) ==
        doctest::Approx(0.59564153585926294).epsilon(1e-14));
  CHECK(kernel_eval(spot_params(KernelFamily::SquaredExponential), x, y) ==
        doctest::Approx(0.73575888234288445).epsilon(1e-14));
}

TEST_CASE("kernel at zero distance equals the variance") {
  Eigen::Vector2d x(0.3, -1.2);
  for (auto fam : {KernelFamily::Matern32, KernelFamily::SquaredExponential}) {
    CHECK(kernel_eval(spot_params(fam), x, x) == 2.0);
  }
}

TEST_CASE("cross and gram agree with pointwise evaluation") {
  KernelParams p = spot_params(KernelFamily::Matern32);
  Eigen::MatrixXd X(4, 2);
  X << 0.0, 0.0, 0.5, 1.0, -1.0, 2.0, 0.25, -0.75;
  Eigen::Vector2d y(0.1, 0.2);

  Eigen::VectorXd c = kernel_cross(p, X, y);
  Eigen::MatrixXd G = kernel_gram(p, X);
  for (int i = 0; i < 4; ++i) {
    CHECK(c(i) == kernel_eval(p, X.row(i).transpose(), y));
    for (int j = 0; j < 4; ++j) {
      CHECK(G(i, j) == kernel_eval(p, X.row(i).transpose(),
                                   X.row(j).transpose()));
      CHECK(G(i, j) == G(j, i));
    }
  }
  // positive definite after a whisper of jitter
  Eigen::MatrixXd Gj = G;
  Gj.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(Gj);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("kernel parameter validation") {
  KernelParams p = spot_params(KernelFamily::Matern32);
  CHECK_NOTHROW(p.validate(2));
  CHECK_THROWS(p.validate(3));
  p.variance = -1.0;
  CHECK_THROWS(p.validate(2));
  p = spot_params(KernelFamily::Matern32);
  p.lengthscales(0) = 0.0;
  CHECK_THROWS(p.validate(2));
}

TEST_CASE("trend bases") {
  Eigen::Vector2d x(0.5, -1.0);
  CHECK(trend_size(TrendBasis::Constant, 2) == 1);
  CHECK(trend_size(TrendBasis::Linear, 2) == 3);

  Eigen::VectorXd f = trend_features(TrendBasis::Constant, x);
  REQUIRE(f.size() == 1);
  CHECK(f(0) == 1.0);

  f = trend_features(TrendBasis::Linear, x);
  REQUIRE(f.size() == 3);
  CHECK(f(0) == 1.0);
  CHECK(f(1) == 0.5);
  CHECK(f(2) == -1.0);

  Eigen::MatrixXd X(2, 2);
  X << 0.5, -1.0, 2.0, 3.0;
  Eigen::MatrixXd F = trend_matrix(TrendBasis::Linear, X);
  REQUIRE(F.rows() == 2);
  REQUIRE(F.cols() == 3);
  CHECK(F(1, 2) == 3.0);
}
