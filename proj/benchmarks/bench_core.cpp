#include <benchmark/benchmark.h>

#include <cmath>

#include <Eigen/Dense>

#include "surq/criteria.hpp"
#include "surq/gp.hpp"
#include "surq/klevel.hpp"
#include "surq/percentile.hpp"
#include "surq/rng.hpp"
#include "surq/special_functions.hpp"

namespace {

using namespace surq;

struct Scene {
  GpPosterior post;
  McCloud cloud;
  Eigen::VectorXd x;
};

Eigen::MatrixXd uniform_points(int n, int d, Rng& rng) {
  Eigen::MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform();
  return pts;
}

Scene make_scene(int n, int l) {
  Rng rng(derive_stream(42, "bench"));
  const int d = 2;
  Design des;
  des.points = uniform_points(n, d, rng);
  des.values.resize(n);
  for (int i = 0; i < n; ++i)
    des.values(i) =
        std::sin(3.0 * des.points(i, 0)) + des.points(i, 1) * des.points(i, 1);

  KernelParams kp;
  kp.variance = 1.0;
  kp.lengthscales = Eigen::VectorXd::Constant(d, 0.4);
  kp.family = KernelFamily::Matern32;

  Scene s;
  s.post = fit_posterior(des, kp, TrendModel{}, 1e-8);
  s.cloud = build_cloud(s.post, uniform_points(l, d, rng), 0.85);
  s.x = Eigen::VectorXd::Constant(d, 0.37);
  return s;
}

LineFamily family_for(const Scene& s) {
  Eigen::VectorXd half = s.post.half_vec(s.x);
  LineFamily fam;
  fam.slopes = kernel_cross(s.post.kernel(), s.cloud.points, s.x) -
               s.cloud.half.transpose() * half;
  fam.intercepts = s.cloud.means;
  fam.k = s.cloud.rank;
  return fam;
}

void BM_NormCdf(benchmark::State& state) {
  double x = -6.0, acc = 0.0;
  for (auto _ : state) {
    acc += norm_cdf(x);
    x += 1e-4;
    if (x > 6.0) x = -6.0;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_NormCdf);

void BM_BvnCdf(benchmark::State& state) {
  double h = -2.0, acc = 0.0;
  for (auto _ : state) {
    acc += bvn_cdf(h, 0.4, 0.65);
    h += 1e-3;
    if (h > 2.0) h = -2.0;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_BvnCdf);

void BM_BvnInterval(benchmark::State& state) {
  BvnAngular ang;
  bvn_angular_prepare(0.65, ang);
  const double p_lo = norm_cdf(0.1);
  const double p_hi = norm_cdf(0.7);
  double h = -2.0, acc = 0.0;
  for (auto _ : state) {
    acc += bvn_cdf_interval(ang, h, 0.1, 0.7, norm_cdf(h), p_lo, p_hi);
    h += 1e-3;
    if (h > 2.0) h = -2.0;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_BvnInterval);

void BM_KLevelSweep(benchmark::State& state) {
  Scene s = make_scene(40, static_cast<int>(state.range(0)));
  LineFamily fam = family_for(s);
  for (auto _ : state) {
    KLevelProfile p = compute_klevel(fam);
    benchmark::DoNotOptimize(p.segment_index.data());
  }
}
BENCHMARK(BM_KLevelSweep)->Arg(200)->Arg(1000)->Arg(3000);

void BM_KLevelDirect(benchmark::State& state) {
  Scene s = make_scene(40, static_cast<int>(state.range(0)));
  LineFamily fam = family_for(s);
  for (auto _ : state) {
    KLevelProfile p = compute_klevel_direct(fam);
    benchmark::DoNotOptimize(p.segment_index.data());
  }
}
BENCHMARK(BM_KLevelDirect)->Arg(200)->Arg(1000)->Arg(3000);

void BM_JVar(benchmark::State& state) {
  Scene s = make_scene(40, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double v = j_var(s.post, s.cloud, s.x);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_JVar)->Arg(1000)->Arg(3000);

void BM_JProb(benchmark::State& state) {
  Scene s = make_scene(40, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    ProbEval e = j_prob(s.post, s.cloud, s.x);
    benchmark::DoNotOptimize(e.value);
  }
}
BENCHMARK(BM_JProb)->Arg(1000)->Arg(3000);

void BM_UpdatePosterior(benchmark::State& state) {
  Scene s = make_scene(static_cast<int>(state.range(0)), 100);
  for (auto _ : state) {
    GpPosterior next = update_posterior(s.post, s.x, 0.5);
    benchmark::DoNotOptimize(next.size());
  }
}
BENCHMARK(BM_UpdatePosterior)->Arg(30)->Arg(90);

void BM_PredictBatch(benchmark::State& state) {
  Scene s = make_scene(90, 100);
  Rng rng(derive_stream(7, "bench"));
  Eigen::MatrixXd pool = uniform_points(static_cast<int>(state.range(0)), 2, rng);
  Eigen::VectorXd means, vars;
  for (auto _ : state) {
    s.post.predict_batch(pool, means, vars);
    benchmark::DoNotOptimize(means.data());
  }
}
BENCHMARK(BM_PredictBatch)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
