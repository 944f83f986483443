#include <cmath>

#include <doctest.h>

#include "surq/rng.hpp"
#include "surq/special_functions.hpp"
#include "surq/testbed.hpp"

using namespace surq;

TEST_CASE("branin on the rescaled unit square") {
  TestFunction f = branin2();
  CHECK(f.dim == 2);
  CHECK(f(Eigen::Vector2d(0.0, 0.0)) ==
        doctest::Approx(308.129096011607).epsilon(1e-12));
  // global minimum, mapped back into [0,1]^2
  double pi = 3.14159265358979323846;
  CHECK(f(Eigen::Vector2d((pi + 5.0) / 15.0, 2.275 / 15.0)) ==
        doctest::Approx(0.397887357729738).epsilon(1e-9));
  CHECK(*f.evaluations == 2);
}

TEST_CASE("hartman4 spot values") {
  TestFunction f = hartman4();
  CHECK(f(Eigen::VectorXd::Constant(4, 0.5)) ==
        doctest::Approx(-2.36542529212707).epsilon(1e-12));
  CHECK(f(Eigen::VectorXd::Zero(4)) ==
        doctest::Approx(-1.76141673632137).epsilon(1e-12));
  // at the first exponential's centre
  Eigen::VectorXd p1(4);
  p1 << 0.1312, 0.1696, 0.5569, 0.0124;
  CHECK(f(p1) == doctest::Approx(-2.58978873866431).epsilon(1e-12));
  // far away all exponentials vanish
  CHECK(f(Eigen::VectorXd::Constant(4, 50.0)) ==
        doctest::Approx(-2.58 / 1.94).epsilon(1e-15));
}

TEST_CASE("ackley spot values") {
  TestFunction f6 = ackley(6);
  CHECK(std::fabs(f6(Eigen::VectorXd::Zero(6))) < 1e-12);
  CHECK(f6(Eigen::VectorXd::Constant(6, 0.3)) ==
        doctest::Approx(3.14882286358508).epsilon(1e-12));
  TestFunction f2 = ackley(2);
  CHECK(f2(Eigen::Vector2d(1.0, -1.0)) ==
        doctest::Approx(3.62538493844036).epsilon(1e-12));

  // the four-term variant ignores trailing coordinates
  TestFunction g = ackley_first4(6);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(6, 0.3);
  Eigen::VectorXd y = x;
  y(4) = -3.0;
  y(5) = 7.0;
  CHECK(g(x) == g(y));
  TestFunction f4 = ackley(4);
  CHECK(g(x) == f4(Eigen::VectorXd::Constant(4, 0.3)));
  CHECK_THROWS(ackley(0));
  CHECK_THROWS(ackley_first4(3));
}

TEST_CASE("input distributions") {
  UniformBox box = unit_box(3);
  InputDistribution db = box;
  CHECK(input_dim(db) == 3);
  CHECK(input_scale(db)(1) == 1.0);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(4, 4, 0.05);
  cov.diagonal().array() = 0.1;
  GaussianInput g = make_gaussian(Eigen::VectorXd::Constant(4, 0.5), cov);
  InputDistribution dg = g;
  CHECK(input_dim(dg) == 4);
  CHECK(input_scale(dg)(0) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-14));
  // the stored factor reproduces the covariance
  CHECK(((g.chol * g.chol.transpose() - cov).lpNorm<Eigen::Infinity>()) <
        1e-12);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(2, 2, 1.0);
  bad(0, 1) = 2.0;
  bad(1, 0) = 2.0;
  CHECK_THROWS(make_gaussian(Eigen::VectorXd::Zero(2), bad));
}

TEST_CASE("sampling respects the distribution") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(2, 2, 0.05);
  cov.diagonal().array() = 0.1;
  InputDistribution dg =
      make_gaussian(Eigen::VectorXd::Constant(2, 0.5), cov);

  Rng rng(derive_stream(9, "sample"));
  Eigen::MatrixXd X = sample_inputs(dg, 60000, rng);
  REQUIRE(X.rows() == 60000);
  Eigen::VectorXd mean = X.colwise().mean();
  CHECK(mean(0) == doctest::Approx(0.5).epsilon(0.02));
  Eigen::MatrixXd centered = X.rowwise() - mean.transpose();
  Eigen::MatrixXd sample_cov =
      centered.transpose() * centered / (X.rows() - 1.0);
  CHECK(sample_cov(0, 0) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(sample_cov(0, 1) == doctest::Approx(0.05).epsilon(0.1));

  InputDistribution db = unit_box(2);
  Eigen::MatrixXd U = sample_inputs(db, 1000, rng);
  CHECK(U.minCoeff() >= 0.0);
  CHECK(U.maxCoeff() <= 1.0);
}

TEST_CASE("latin hypercube designs stratify each margin") {
  InputDistribution db = unit_box(2);
  Rng rng(derive_stream(10, "lhs"));
  int n = 40;
  Eigen::MatrixXd X = lhs_design(db, n, rng);
  REQUIRE(X.rows() == n);
  for (int j = 0; j < 2; ++j) {
    std::vector<int> strata(n, 0);
    for (int i = 0; i < n; ++i) {
      int cell = std::min(n - 1, static_cast<int>(X(i, j) * n));
      strata[cell]++;
    }
    for (int c : strata) CHECK(c == 1);  // exactly one point per cell
  }

  // Gaussian margins push the strata through the quantile function
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2, 2) * 0.04;
  InputDistribution dg = make_gaussian(Eigen::VectorXd::Zero(2), cov);
  Eigen::MatrixXd G = lhs_design(dg, n, rng);
  for (int j = 0; j < 2; ++j) {
    std::vector<int> strata(n, 0);
    for (int i = 0; i < n; ++i) {
      double u = norm_cdf(G(i, j) / 0.2);
      int cell = std::min(n - 1, static_cast<int>(u * n));
      strata[cell]++;
    }
    for (int c : strata) CHECK(c == 1);
  }

  // reproducible for a fixed stream
  Rng r1(derive_stream(11, "lhs"));
  Rng r2(derive_stream(11, "lhs"));
  Eigen::MatrixXd A = lhs_design(db, 16, r1);
  Eigen::MatrixXd B = lhs_design(db, 16, r2);
  CHECK((A.array() == B.array()).all());
}

TEST_CASE("reference percentile on a known distribution") {
  // identity function of a standard gaussian: the percentile is the normal
  // quantile, and the counter is left untouched
  TestFunction ident = custom_function("ident", 1, [](const Eigen::VectorXd& x) {
    return x[0];
  });
  InputDistribution dg = make_gaussian(Eigen::VectorXd::Zero(1),
                                       Eigen::MatrixXd::Identity(1, 1));
  OraclePercentile o = oracle_percentile(ident, dg, 0.85, 400000, 77);
  CHECK(*ident.evaluations == 0);
  CHECK(o.value == doctest::Approx(norm_quantile(0.85)).epsilon(0.02));
  CHECK(o.band_lo < o.value);
  CHECK(o.band_hi > o.value);
  CHECK(o.spread ==
        doctest::Approx(2.0 * norm_quantile(0.995)).epsilon(0.05));
  CHECK(o.n == 400000);
  CHECK_THROWS(oracle_percentile(ident, dg, 0.85, 100, 1));

  CHECK(error_percent(o.value + 0.01 * o.spread, o) ==
        doctest::Approx(1.0).epsilon(1e-9));
}
