#include "surq/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "surq/parallel.hpp"
#include "surq/rng.hpp"
#include "surq/special_functions.hpp"

namespace surq {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Prob:
      return "prob";
    case Strategy::Var:
      return "var";
    case Strategy::RandomSearch:
      return "rs";
  }
  return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "prob") return Strategy::Prob;
  if (name == "var") return Strategy::Var;
  if (name == "rs") return Strategy::RandomSearch;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (expected prob, var, or rs)");
}

void SurConfig::validate(int dim) const {
  if (n_initial < trend_size(basis, dim) + 2)
    throw std::invalid_argument("config: initial design too small for the trend");
  if (n_total < n_initial)
    throw std::invalid_argument("config: total budget below the initial design");
  if (cloud_size < 2)
    throw std::invalid_argument("config: cloud needs at least two points");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("config: alpha must be in (0, 1)");
  if (!search_on_cloud && (pool_size < 1 || shortlist < 1))
    throw std::invalid_argument("config: pool and shortlist must be positive");
  if (refit_every < 0)
    throw std::invalid_argument("config: refit_every must be >= 0");
}

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

bool near_any_row(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& tol) {
  for (int i = 0; i < X.rows(); ++i) {
    bool close = true;
    for (int j = 0; j < X.cols(); ++j) {
      if (std::fabs(X(i, j) - x[j]) > tol[j]) {
        close = false;
        break;
      }
    }
    if (close) return true;
  }
  return false;
}

}  // namespace

RunRecord run_sur(const TestFunction& fn, const InputDistribution& dist,
                  const SurConfig& cfg, Strategy strategy) {
  const int d = input_dim(dist);
  if (fn.dim != d)
    throw std::invalid_argument("engine: function/distribution dimension mismatch");
  cfg.validate(d);

  Rng lhs_rng(derive_stream(cfg.seed, "lhs"));
  Rng cloud_rng(derive_stream(cfg.seed, "cloud"));
  Rng pool_rng(derive_stream(cfg.seed, "pool"));
  Rng shortlist_rng(derive_stream(cfg.seed, "shortlist"));
  Rng baseline_rng(derive_stream(cfg.seed, "baseline"));

  FitOptions fit = cfg.fit;
  fit.seed = derive_stream(cfg.seed, "fit");

  const Eigen::VectorXd scale = input_scale(dist).cwiseMax(1e-12);
  const Eigen::VectorXd dup_tol = 1e-9 * scale;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  Timer total;

  Design design;
  design.points = lhs_design(dist, cfg.n_initial, lhs_rng);
  design.values.resize(cfg.n_initial);
  for (int i = 0; i < cfg.n_initial; ++i)
    design.values[i] = fn(design.points.row(i).transpose());

  KernelParams kernel = fit_hyperparameters(design, cfg.family, cfg.basis, fit);
  fit.hint = kernel.lengthscales;
  const TrendModel trend{cfg.basis, Eigen::VectorXd()};
  GpPosterior post =
      fit_posterior(design, kernel, trend, fit.rel_nugget * kernel.variance);

  RunRecord rec;
  rec.strategy = strategy;

  Eigen::MatrixXd cloud_pts = sample_inputs(dist, cfg.cloud_size, cloud_rng);

  const int n_steps = cfg.n_total - cfg.n_initial;
  for (int step = 0; step < n_steps; ++step) {
    Timer st;
    if (cfg.renew_cloud && step > 0)
      cloud_pts = sample_inputs(dist, cfg.cloud_size, cloud_rng);
    McCloud cloud = build_cloud(post, cloud_pts, cfg.alpha);
    rec.estimates.push_back(cloud.estimate.value);

    IterationLog log;
    log.n_before = post.size();
    log.estimate = cloud.estimate.value;

    Eigen::VectorXd x_next;
    if (strategy == Strategy::RandomSearch) {
      for (int tries = 0;; ++tries) {
        if (tries >= 1000)
          throw std::runtime_error("engine: cannot sample a fresh point");
        x_next = sample_inputs(dist, 1, baseline_rng).row(0).transpose();
        if (!near_any_row(post.design().points, x_next, dup_tol)) break;
      }
    } else {
      Eigen::MatrixXd cand_pts;
      if (cfg.search_on_cloud) {
        cand_pts = cloud.points;
      } else {
        Eigen::MatrixXd pool = sample_inputs(dist, cfg.pool_size, pool_rng);
        Eigen::VectorXd pmeans, pvars;
        post.predict_batch(pool, pmeans, pvars);
        const double q = cloud.estimate.value;

        // Weighted shortlist without replacement: larger keys win, with
        // weights peaking where the posterior straddles the percentile.
        const int P = static_cast<int>(pool.rows());
        Eigen::VectorXd key(P);
        double wmax = 0.0;
        for (int i = 0; i < P; ++i) {
          double w = 0.0;
          if (pvars[i] > cfg.criterion.degenerate_var)
            w = norm_pdf((q - pmeans[i]) / std::sqrt(pvars[i]));
          wmax = std::max(wmax, w);
          double u = shortlist_rng.uniform();
          key[i] = w > 0.0 ? std::log(u) / w : neg_inf;
        }
        const int K = std::min(cfg.shortlist, P);
        std::vector<int> idx(P);
        std::iota(idx.begin(), idx.end(), 0);
        if (wmax == 0.0) {
          log.uniform_fallback = true;
          for (int i = 0; i < K; ++i)
            std::swap(idx[i], idx[i + shortlist_rng.below(P - i)]);
          idx.resize(K);
        } else {
          std::partial_sort(idx.begin(), idx.begin() + K, idx.end(),
                            [&](int a, int b) { return key[a] > key[b]; });
          idx.resize(K);
          while (!idx.empty() && key[idx.back()] == neg_inf) idx.pop_back();
        }
        cand_pts.resize(static_cast<int>(idx.size()), d);
        for (int r = 0; r < static_cast<int>(idx.size()); ++r)
          cand_pts.row(r) = pool.row(idx[r]);
      }

      std::vector<int> keep;
      for (int i = 0; i < cand_pts.rows(); ++i) {
        Eigen::VectorXd x = cand_pts.row(i).transpose();
        if (near_any_row(post.design().points, x, dup_tol)) continue;
        if (cfg.search_on_cloud) {
          if (cloud.stds[i] * cloud.stds[i] <= cfg.criterion.degenerate_var)
            continue;
        } else {
          double m, v;
          post.predict(x, m, v);
          if (v <= cfg.criterion.degenerate_var) continue;
        }
        keep.push_back(i);
      }
      if (keep.empty())
        throw std::runtime_error("engine: no admissible candidates");

      const int C = static_cast<int>(keep.size());
      std::vector<double> val(C);
      std::vector<int> nint(C, 0);
      parallel_for(C, [&](int i) {
        Eigen::VectorXd x = cand_pts.row(keep[i]).transpose();
        if (strategy == Strategy::Var) {
          val[i] = j_var(post, cloud, x, cfg.criterion);
        } else {
          ProbEval pe = j_prob(post, cloud, x, cfg.criterion);
          val[i] = pe.value;
          nint[i] = pe.n_intervals;
        }
      });
      int best = 0;
      for (int i = 1; i < C; ++i) {
        bool better = strategy == Strategy::Var ? val[i] > val[best]
                                                : val[i] < val[best];
        if (better) best = i;
      }
      x_next = cand_pts.row(keep[best]).transpose();
      log.criterion_value = val[best];
      log.n_intervals = nint[best];

      if (cfg.local_refine && strategy == Strategy::Var) {
        const auto* box = std::get_if<UniformBox>(&dist);
        double best_val = log.criterion_value;
        Eigen::VectorXd x_cur = x_next;
        Eigen::VectorXd h = 0.1 * scale;
        int evals = 0;
        while (evals < cfg.refine_max_evals) {
          bool moved = false;
          for (int j = 0; j < d && evals < cfg.refine_max_evals; ++j) {
            for (double sgn : {1.0, -1.0}) {
              if (evals >= cfg.refine_max_evals) break;
              Eigen::VectorXd xt = x_cur;
              xt[j] += sgn * h[j];
              if (box) xt[j] = std::clamp(xt[j], box->lo[j], box->hi[j]);
              if (xt[j] == x_cur[j]) continue;
              if (near_any_row(post.design().points, xt, dup_tol)) continue;
              ++evals;
              double v = j_var(post, cloud, xt, cfg.criterion);
              if (v > best_val) {
                best_val = v;
                x_cur = xt;
                moved = true;
              }
            }
          }
          if (!moved) {
            h *= 0.5;
            if ((h.array() < 1e-6 * scale.array()).all()) break;
          }
        }
        x_next = x_cur;
        log.criterion_value = best_val;
      }
    }

    double g = fn(x_next);
    log.x = x_next;
    log.g = g;

    if (cfg.refit_every > 0 && (step + 1) % cfg.refit_every == 0) {
      Design nd = post.design().appended(x_next, g);
      kernel = fit_hyperparameters(nd, cfg.family, cfg.basis, fit);
      fit.hint = kernel.lengthscales;
      post = fit_posterior(nd, kernel, trend, fit.rel_nugget * kernel.variance);
    } else {
      post = update_posterior(post, x_next, g);
    }

    log.seconds = st.elapsed();
    rec.steps.push_back(std::move(log));
  }

  if (cfg.renew_cloud && n_steps > 0)
    cloud_pts = sample_inputs(dist, cfg.cloud_size, cloud_rng);
  McCloud final_cloud = build_cloud(post, cloud_pts, cfg.alpha);
  rec.estimates.push_back(final_cloud.estimate.value);

  rec.design = post.design();
  rec.kernel = post.kernel();
  rec.seconds = total.elapsed();
  return rec;
}

}  // namespace surq
