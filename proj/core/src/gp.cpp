#include "surq/gp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace surq {

namespace {

constexpr double kDuplicateTol = 1e-12;
constexpr double kDegenerateVar = 1e-12;
constexpr double kVarFloorHard = 1e-12;

double coordinate_scale(const Eigen::MatrixXd& points) {
  double scale = 1.0;
  for (int j = 0; j < points.cols(); ++j) {
    double r = points.col(j).maxCoeff() - points.col(j).minCoeff();
    scale = std::max(scale, r);
  }
  return scale;
}

bool rows_coincide(const Eigen::MatrixXd& points, int i, int k, double tol) {
  for (int j = 0; j < points.cols(); ++j) {
    if (std::fabs(points(i, j) - points(k, j)) > tol) return false;
  }
  return true;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& K) {
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "gp: covariance factorization failed; the design may contain "
        "near-duplicate points, try a larger nugget");
  return llt.matrixL();
}

// GLS trend coefficients in whitened coordinates: A = L^{-1}F, b = L^{-1}g.
Eigen::VectorXd gls_beta(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  return (A.transpose() * A).ldlt().solve(A.transpose() * b);
}

}  // namespace

void Design::validate() const {
  if (points.rows() == 0) throw std::invalid_argument("design: empty");
  if (points.rows() != values.size())
    throw std::invalid_argument("design: points/values size mismatch");
  if (!points.allFinite() || !values.allFinite())
    throw std::invalid_argument("design: non-finite entries");
  double tol = kDuplicateTol * coordinate_scale(points);
  for (int i = 0; i < points.rows(); ++i) {
    for (int k = i + 1; k < points.rows(); ++k) {
      if (rows_coincide(points, i, k, tol))
        throw std::invalid_argument("design: duplicate points at rows " +
                                    std::to_string(i) + " and " +
                                    std::to_string(k));
    }
  }
}

Design Design::appended(const Eigen::VectorXd& x, double g) const {
  if (x.size() != dim())
    throw std::invalid_argument("design: appended point has wrong dimension");
  if (!x.allFinite() || !std::isfinite(g))
    throw std::invalid_argument("design: appended observation is non-finite");
  double tol = kDuplicateTol * coordinate_scale(points);
  for (int i = 0; i < points.rows(); ++i) {
    bool same = true;
    for (int j = 0; j < points.cols(); ++j) {
      if (std::fabs(points(i, j) - x[j]) > tol) {
        same = false;
        break;
      }
    }
    if (same)
      throw std::invalid_argument("design: appended point duplicates row " +
                                  std::to_string(i));
  }
  Design out;
  out.points.resize(points.rows() + 1, points.cols());
  out.points.topRows(points.rows()) = points;
  out.points.bottomRows(1) = x.transpose();
  out.values.resize(values.size() + 1);
  out.values.head(values.size()) = values;
  out.values[values.size()] = g;
  return out;
}

double GpPosterior::trend_value(const Eigen::VectorXd& x) const {
  return trend_features(trend_.basis, x).dot(trend_.beta);
}

Eigen::VectorXd GpPosterior::half_vec(const Eigen::VectorXd& x) const {
  Eigen::VectorXd c = kernel_cross(kernel_, design_.points, x);
  return chol_.triangularView<Eigen::Lower>().solve(c);
}

Eigen::MatrixXd GpPosterior::half_cross(const Eigen::MatrixXd& P) const {
  const int n = size();
  const int m = static_cast<int>(P.rows());
  const int d = dim();
  Eigen::MatrixXd C(n, m);
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) {
        double t = (design_.points(r, j) - P(i, j)) / kernel_.lengthscales[j];
        s += t * t;
      }
      double rr = std::sqrt(s);
      double v;
      if (kernel_.family == KernelFamily::Matern32) {
        double u = 1.7320508075688772935 * rr;
        v = kernel_.variance * (1.0 + u) * std::exp(-u);
      } else {
        v = kernel_.variance * std::exp(-0.5 * rr * rr);
      }
      C(r, i) = v;
    }
  }
  chol_.triangularView<Eigen::Lower>().solveInPlace(C);
  return C;
}

void GpPosterior::predict(const Eigen::VectorXd& x, double& mean,
                          double& var) const {
  Eigen::VectorXd c = kernel_cross(kernel_, design_.points, x);
  Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>().solve(c);
  mean = trend_value(x) + c.dot(alpha_);
  var = kernel_.variance - w.squaredNorm();
  var = std::min(kernel_.variance, std::max(0.0, var));
}

double GpPosterior::predict_mean(const Eigen::VectorXd& x) const {
  return trend_value(x) +
         kernel_cross(kernel_, design_.points, x).dot(alpha_);
}

double GpPosterior::predict_cov(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) const {
  Eigen::VectorXd wx = half_vec(x);
  Eigen::VectorXd wy = half_vec(y);
  return kernel_eval(kernel_, x, y) - wx.dot(wy);
}

void GpPosterior::predict_batch(const Eigen::MatrixXd& P,
                                Eigen::VectorXd& means, Eigen::VectorXd& vars,
                                Eigen::MatrixXd* half_out) const {
  const int m = static_cast<int>(P.rows());
  means.resize(m);
  vars.resize(m);
  if (half_out) half_out->resize(size(), m);
  // c' alpha = (L w)' alpha = w' (L' alpha), so the cross block itself need
  // not be kept past the triangular solve.
  Eigen::VectorXd u = chol_.transpose().triangularView<Eigen::Upper>() * alpha_;
  const int block = 4096;
  for (int at = 0; at < m; at += block) {
    int b = std::min(block, m - at);
    Eigen::MatrixXd W = half_cross(P.middleRows(at, b));
    if (half_out) half_out->middleCols(at, b) = W;
    for (int i = 0; i < b; ++i) {
      means[at + i] = trend_value(P.row(at + i).transpose());
      vars[at + i] =
          std::min(kernel_.variance,
                   std::max(0.0, kernel_.variance - W.col(i).squaredNorm()));
    }
    means.segment(at, b) += W.transpose() * u;
  }
}

GpPosterior fit_posterior(const Design& design, const KernelParams& kernel,
                          const TrendModel& trend, double nugget) {
  design.validate();
  kernel.validate(design.dim());
  if (nugget < 0.0 || !std::isfinite(nugget))
    throw std::invalid_argument("gp: nugget must be non-negative");

  GpPosterior post;
  post.design_ = design;
  post.kernel_ = kernel;
  post.trend_ = trend;
  post.nugget_ = nugget;

  Eigen::MatrixXd K = kernel_gram(kernel, design.points);
  K.diagonal().array() += nugget;
  post.chol_ = cholesky_lower(K);

  Eigen::MatrixXd F = trend_matrix(trend.basis, design.points);
  if (!trend.fitted()) {
    Eigen::MatrixXd A = post.chol_.triangularView<Eigen::Lower>().solve(F);
    Eigen::VectorXd b =
        post.chol_.triangularView<Eigen::Lower>().solve(design.values);
    post.trend_.beta = gls_beta(A, b);
  } else if (trend.beta.size() != F.cols()) {
    throw std::invalid_argument("gp: trend coefficient count mismatch");
  }

  Eigen::VectorXd resid = design.values - F * post.trend_.beta;
  Eigen::VectorXd half =
      post.chol_.triangularView<Eigen::Lower>().solve(resid);
  post.alpha_ =
      post.chol_.transpose().triangularView<Eigen::Upper>().solve(half);
  return post;
}

GpPosterior update_posterior(const GpPosterior& post,
                             const Eigen::VectorXd& x_new, double g_new) {
  if (x_new.size() != post.dim())
    throw std::invalid_argument("gp: update point has wrong dimension");

  Eigen::VectorXd w = post.half_vec(x_new);
  double s2 = post.kernel_.variance - w.squaredNorm();
  if (s2 <= kDegenerateVar)
    throw std::invalid_argument(
        "gp: degenerate update, the point is already determined by the design");

  Design extended = post.design_.appended(x_new, g_new);

  double d2 = post.kernel_.variance + post.nugget_ - w.squaredNorm();
  if (d2 <= 0.0)
    throw std::runtime_error("gp: update factorization failed");

  const int n = post.size();
  GpPosterior out;
  out.design_ = std::move(extended);
  out.kernel_ = post.kernel_;
  out.trend_ = post.trend_;  // frozen coefficients
  out.nugget_ = post.nugget_;
  out.chol_.setZero(n + 1, n + 1);
  out.chol_.topLeftCorner(n, n) = post.chol_;
  out.chol_.block(n, 0, 1, n) = w.transpose();
  out.chol_(n, n) = std::sqrt(d2);

  Eigen::MatrixXd F = trend_matrix(out.trend_.basis, out.design_.points);
  Eigen::VectorXd resid = out.design_.values - F * out.trend_.beta;
  Eigen::VectorXd half =
      out.chol_.triangularView<Eigen::Lower>().solve(resid);
  out.alpha_ =
      out.chol_.transpose().triangularView<Eigen::Upper>().solve(half);
  return out;
}

double profile_loglik(const Design& design, KernelFamily family,
                      TrendBasis basis, const Eigen::VectorXd& lengthscales,
                      double rel_nugget, double* sigma2_out) {
  const int n = design.size();
  KernelParams corr{1.0, lengthscales, family};
  corr.validate(design.dim());

  Eigen::MatrixXd R = kernel_gram(corr, design.points);
  R.diagonal().array() += rel_nugget;
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gp: correlation factorization failed");
  Eigen::MatrixXd L = llt.matrixL();

  Eigen::MatrixXd F = trend_matrix(basis, design.points);
  Eigen::MatrixXd A = L.triangularView<Eigen::Lower>().solve(F);
  Eigen::VectorXd b = L.triangularView<Eigen::Lower>().solve(design.values);
  Eigen::VectorXd beta = gls_beta(A, b);
  double rss = (b - A * beta).squaredNorm();
  double sigma2 = std::max(rss / n, kVarFloorHard);
  if (sigma2_out) *sigma2_out = sigma2;

  double logdet = 2.0 * L.diagonal().array().log().sum();
  constexpr double kLog2Pi = 1.8378770664093454836;
  return -0.5 * (n * kLog2Pi + n * std::log(sigma2) + logdet + n);
}

namespace {

struct NmObjective {
  const Design& design;
  KernelFamily family;
  TrendBasis basis;
  double rel_nugget;
  Eigen::VectorXd lo, hi;  // log-lengthscale box
  mutable long failures = 0;
  mutable long evals = 0;

  double operator()(Eigen::VectorXd theta) const {
    ++evals;
    for (int j = 0; j < theta.size(); ++j)
      theta[j] = std::min(hi[j], std::max(lo[j], theta[j]));
    try {
      return -profile_loglik(design, family, basis, theta.array().exp(),
                             rel_nugget);
    } catch (const std::runtime_error&) {
      ++failures;
      return std::numeric_limits<double>::infinity();
    }
  }
};

// Standard Nelder-Mead with box projection inside the objective.
std::pair<Eigen::VectorXd, double> nelder_mead(const NmObjective& f,
                                               const Eigen::VectorXd& start,
                                               int max_evals) {
  const int d = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> pts(d + 1, start);
  std::vector<double> val(d + 1);
  for (int j = 0; j < d; ++j) pts[j + 1][j] += 0.5;
  for (int i = 0; i <= d; ++i) val[i] = f(pts[i]);

  auto order = [&] {
    for (int i = 1; i <= d; ++i) {
      Eigen::VectorXd p = pts[i];
      double v = val[i];
      int k = i;
      while (k > 0 && val[k - 1] > v) {
        pts[k] = pts[k - 1];
        val[k] = val[k - 1];
        --k;
      }
      pts[k] = p;
      val[k] = v;
    }
  };
  order();

  int used = d + 1;
  while (used < max_evals) {
    if (std::isfinite(val[0]) &&
        std::fabs(val[d] - val[0]) < 1e-10 * (1.0 + std::fabs(val[0])))
      break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += pts[i];
    centroid /= d;

    Eigen::VectorXd xr = centroid + (centroid - pts[d]);
    double fr = f(xr);
    ++used;
    if (fr < val[0]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[d]);
      double fe = f(xe);
      ++used;
      if (fe < fr) {
        pts[d] = xe;
        val[d] = fe;
      } else {
        pts[d] = xr;
        val[d] = fr;
      }
    } else if (fr < val[d - 1]) {
      pts[d] = xr;
      val[d] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (pts[d] - centroid);
      double fc = f(xc);
      ++used;
      if (fc < val[d]) {
        pts[d] = xc;
        val[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          val[i] = f(pts[i]);
        }
        used += d;
      }
    }
    order();
  }
  return {pts[0], val[0]};
}

}  // namespace

KernelParams fit_hyperparameters(const Design& design, KernelFamily family,
                                 TrendBasis basis, const FitOptions& opts) {
  design.validate();
  const int d = design.dim();

  Eigen::VectorXd range(d);
  for (int j = 0; j < d; ++j) {
    double r = design.points.col(j).maxCoeff() - design.points.col(j).minCoeff();
    range[j] = r > 1e-8 ? r : 1.0;
  }
  NmObjective obj{design, family, basis, opts.rel_nugget,
                  (opts.ls_lower * range.array()).log().matrix(),
                  (opts.ls_upper * range.array()).log().matrix()};

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::VectorXd> starts;
  if (opts.hint && opts.hint->size() == d) {
    Eigen::VectorXd h = opts.hint->array().log().matrix();
    for (int j = 0; j < d; ++j) h[j] = std::min(obj.hi[j], std::max(obj.lo[j], h[j]));
    starts.push_back(h);
  }
  if (starts.empty()) starts.push_back(0.5 * (obj.lo + obj.hi));
  while (static_cast<int>(starts.size()) < opts.n_starts) {
    Eigen::VectorXd s(d);
    for (int j = 0; j < d; ++j)
      s[j] = obj.lo[j] + unit(rng) * (obj.hi[j] - obj.lo[j]);
    starts.push_back(s);
  }

  Eigen::VectorXd best;
  double best_val = std::numeric_limits<double>::infinity();
  int per_start = 60 * d + 40;
  for (const auto& s : starts) {
    auto [theta, v] = nelder_mead(obj, s, per_start);
    if (v < best_val) {
      best_val = v;
      best = theta;
    }
  }
  if (!std::isfinite(best_val))
    throw std::runtime_error(
        "gp: hyperparameter fit failed, no start produced a valid "
        "factorization");

  for (int j = 0; j < d; ++j)
    best[j] = std::min(obj.hi[j], std::max(obj.lo[j], best[j]));
  double sigma2 = 0.0;
  profile_loglik(design, family, basis, best.array().exp(), opts.rel_nugget,
                 &sigma2);
  KernelParams out;
  out.variance = std::max(sigma2, opts.var_floor);
  out.lengthscales = best.array().exp();
  out.family = family;
  return out;
}

}  // namespace surq
