#include <cmath>

#include <doctest.h>

#include "oracle_helpers.hpp"
#include "surq/criteria.hpp"
#include "surq/rng.hpp"

using namespace surq;

TEST_CASE("merged intervals partition the window mass") {
  orc::Scene s = orc::random_scene(201, 18, 150, 2, 0.85,
                                   KernelFamily::Matern32);
  Eigen::VectorXd x = orc::pick_candidate(s, 9);
  CandidateProfile cand = klevel_for_candidate(s.post, s.cloud, x, 9.0);
  MergedIntervals iv = merge_intervals(s.cloud, cand);

  REQUIRE(iv.size() >= 1);
  REQUIRE(iv.z_edges.size() == static_cast<size_t>(iv.size() - 1));
  REQUIRE(iv.f_edges.size() == iv.z_edges.size());

  double total = 0.0;
  for (int i = 0; i < iv.size(); ++i) {
    CHECK(iv.prob[i] >= 1e-14);
    CHECK(iv.index[i] >= 0);
    CHECK(iv.index[i] < s.cloud.size());
    total += iv.prob[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (size_t j = 1; j < iv.z_edges.size(); ++j)
    CHECK(iv.z_edges[j] > iv.z_edges[j - 1]);
  CHECK(iv.q_lo <= iv.q_hi);
  // the current estimate is attainable, so it lies in the range
  CHECK(iv.q_lo <= s.cloud.estimate.value);
  CHECK(iv.q_hi >= s.cloud.estimate.value);
}

TEST_CASE("variance criterion: two assembly routes agree") {
  for (int rep = 0; rep < 8; ++rep) {
    orc::Scene s = orc::random_scene(300 + rep, 15, 100 + 15 * rep, 2,
                                     0.2 + 0.09 * rep,
                                     rep % 2 ? KernelFamily::Matern32
                                             : KernelFamily::SquaredExponential);
    Eigen::VectorXd x = orc::pick_candidate(s, rep);
    CandidateProfile cand = klevel_for_candidate(s.post, s.cloud, x, 9.0);
    MergedIntervals iv = merge_intervals(s.cloud, cand);
    double a = j_var_from(s.cloud, cand, iv);
    double b = j_var_second_moment(s.cloud, cand, iv);
    CHECK(a >= 0.0);
    double scale = std::max({1e-12, a, b});
    CHECK(std::fabs(a - b) / scale < 1e-6);
  }
}

TEST_CASE("variance criterion against Monte Carlo, single case") {
  orc::Scene s = orc::random_scene(310, 20, 150, 2, 0.85,
                                   KernelFamily::Matern32);
  Eigen::VectorXd x = orc::pick_candidate(s, 4);
  double v = j_var(s.post, s.cloud, x);
  orc::McVar mc = orc::mc_jvar(s, x, 200000, 99);
  CHECK(std::fabs(v - mc.variance) < 4.0 * mc.se + 1e-12);
}

TEST_CASE("probability criterion against Monte Carlo, single case") {
  orc::Scene s = orc::random_scene(311, 20, 150, 2, 0.85,
                                   KernelFamily::Matern32);
  Eigen::VectorXd x = orc::pick_candidate(s, 4);
  ProbEval e = j_prob(s.post, s.cloud, x);
  CHECK(e.gamma >= 0.0);
  CHECK(e.gamma <= 1.0);
  CHECK(e.value == std::fabs(e.gamma - (1.0 - s.cloud.alpha)));
  orc::McProb mc = orc::mc_jprob(s, x, 40000, 100);
  CHECK(std::fabs(e.gamma - mc.gamma) < 4.0 * mc.se + 1e-12);
}

TEST_CASE("probability criterion: explicit integration set matches default") {
  orc::Scene s = orc::random_scene(312, 16, 120, 2, 0.7,
                                   KernelFamily::Matern32);
  Eigen::VectorXd x = orc::pick_candidate(s, 6);
  ProbEval a = j_prob(s.post, s.cloud, x);
  ProbEval b = j_prob(s.post, s.cloud, s.cloud, x);
  CHECK(a.gamma == b.gamma);  // same vectors, same arithmetic
  CHECK(a.value == b.value);

  // a stale integration cloud is rejected
  GpPosterior grown = update_posterior(s.post, x, 0.0);
  McCloud fresh = build_cloud(grown, s.cloud.points, s.cloud.alpha);
  CHECK_THROWS(j_prob(grown, fresh, s.cloud, x));
}

TEST_CASE("criteria are insensitive to widening the window") {
  orc::Scene s = orc::random_scene(313, 18, 140, 2, 0.9,
                                   KernelFamily::SquaredExponential);
  Eigen::VectorXd x = orc::pick_candidate(s, 7);
  CriterionOptions wide;
  wide.window_sds = 13.0;
  double v9 = j_var(s.post, s.cloud, x);
  double v13 = j_var(s.post, s.cloud, x, wide);
  CHECK(v9 == doctest::Approx(v13).epsilon(1e-9));
  ProbEval p9 = j_prob(s.post, s.cloud, x);
  ProbEval p13 = j_prob(s.post, s.cloud, x, wide);
  CHECK(std::fabs(p9.gamma - p13.gamma) < 1e-11);
}

TEST_CASE("degenerate and uninformative candidates") {
  Design d;
  d.points.resize(5, 1);
  d.points << 0.0, 0.25, 0.5, 0.75, 1.0;
  d.values.resize(5);
  d.values << 0.3, -0.2, 0.9, 0.1, -0.5;
  KernelParams kp;
  kp.variance = 1.0;
  kp.lengthscales = Eigen::VectorXd::Constant(1, 0.3);
  GpPosterior post = fit_posterior(d, kp, TrendModel{}, 0.0);

  Rng rng(derive_stream(314, "cloud"));
  Eigen::MatrixXd pts(80, 1);
  for (int i = 0; i < 80; ++i) pts(i, 0) = rng.uniform();
  McCloud cloud = build_cloud(post, pts, 0.85);

  // at a design point the one-step update can learn nothing
  Eigen::VectorXd x0 = d.points.row(2).transpose();
  CHECK(j_var(post, cloud, x0) == 0.0);
  CHECK_THROWS_AS(j_prob(post, cloud, x0), std::invalid_argument);

  // far away every slope underflows: one interval, vanishing variance
  Eigen::VectorXd far = Eigen::VectorXd::Constant(1, 80.0);
  double jv_far = j_var(post, cloud, far);
  CHECK(jv_far >= 0.0);
  CHECK(jv_far <= 1e-30);
  ProbEval e = j_prob(post, cloud, far);
  CHECK(e.n_intervals == 1);
  CHECK(e.gamma >= 0.0);
  CHECK(e.gamma <= 1.0);
}
