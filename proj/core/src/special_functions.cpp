#include "surq/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <algorithm>

#include <Eigen/Core>

namespace surq {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kTwoPi = 6.2831853071795864769;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Legendre abscissae/weights on (-1, 1), folded half-ranges.
// Node counts picked by |rho| as in the Drezner-Wesolowsky/Genz scheme.
const double kGl6X[3] = {0.9324695142031522, 0.6612093864662647,
                         0.2386191860831970};
const double kGl6W[3] = {0.1713244923791705, 0.3607615730481384,
                         0.4679139345726904};
const double kGl12X[6] = {0.9815606342467191, 0.9041172563704750,
                          0.7699026741943050, 0.5873179542866171,
                          0.3678314989981802, 0.1252334085114692};
const double kGl12W[6] = {0.04717533638651177, 0.1069393259953183,
                          0.1600783285433464,  0.2031674267230659,
                          0.2334925365383547,  0.2491470458134029};
const double kGl20X[10] = {0.9931285991850949, 0.9639719272779138,
                           0.9122344282513259, 0.8391169718222188,
                           0.7463319064601508, 0.6360536807265150,
                           0.5108670019508271, 0.3737060887154196,
                           0.2277858511416451, 0.0765265211334973};
const double kGl20W[10] = {0.01761400713915212, 0.04060142980038694,
                           0.06267204833410906, 0.08327674157670475,
                           0.1019301198172404,  0.1181945319615184,
                           0.1316886384491766,  0.1420961093183821,
                           0.1491729864726037,  0.1527533871307259};

// P(X > h, Y > k), the upper-orthant form the angular quadrature natively
// computes. bvn_cdf flips signs on entry.
double bvn_upper(double h, double k, double r) {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : norm_cdf(-k);
  if (k == -kInf) return norm_cdf(-h);

  if (r == 1.0) return norm_cdf(-std::max(h, k));
  if (r == -1.0) return std::max(0.0, norm_cdf(-h) - norm_cdf(k));

  const double* gx;
  const double* gw;
  int ng;
  double ar = std::fabs(r);
  if (ar < 0.3) {
    gx = kGl6X; gw = kGl6W; ng = 3;
  } else if (ar < 0.75) {
    gx = kGl12X; gw = kGl12W; ng = 6;
  } else {
    gx = kGl20X; gw = kGl20W; ng = 10;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    double hs = (h * h + k * k) / 2.0;
    double asr = std::asin(r);
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        double sn = std::sin(asr * (is * gx[i] + 1.0) / 2.0);
        bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
    return bvn;
  }

  // High-correlation branch: series around |r| = 1 plus a quadrature
  // correction in the transformed variable.
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (ar < 1.0) {
    double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    double bs = (h - k) * (h - k);
    double c = (4.0 - hk) / 8.0;
    double d = (12.0 - hk) / 16.0;
    double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0) {
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
             c * d * as * as / 5.0);
    }
    if (-hk < 100.0) {
      double b = std::sqrt(bs);
      double sp = kSqrt2Pi * norm_cdf(-b / a);
      bvn -= std::exp(-hk / 2.0) * sp * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    double a2 = a / 2.0;
    for (int i = 0; i < 10; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        double x = a2 * (is * kGl20X[i] + 1.0);
        double xs = x * x;
        double rs = std::sqrt(1.0 - xs);
        double asr2 = -(bs / xs + hk) / 2.0;
        if (asr2 > -100.0) {
          double sp2 = 1.0 + c * xs * (1.0 + d * xs);
          double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
          bvn += a2 * kGl20W[i] * std::exp(asr2) * (ep - sp2);
        }
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, k));
  } else {
    bvn = -bvn;
    if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
  }
  return std::min(1.0, std::max(0.0, bvn));
}

}  // namespace

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / kSqrt2Pi;
}

// Cody-style rational approximations for the scaled error function; three
// ranges stitched at |x| = 0.66291 and sqrt(32). Max error well under
// 1e-14 in CDF units.
double norm_cdf(double x) {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;

  static const double a[5] = {2.2352520354606839287e00, 1.6102823106855587881e02,
                              1.0676894854603709582e03, 1.8154981253343561249e04,
                              6.5682337918207449113e-2};
  static const double b[4] = {4.7202581904688241870e01, 9.7609855173777669322e02,
                              1.0260932208618978205e04, 4.5507789335026729956e04};
  static const double c[9] = {3.9894151208813466764e-1, 8.8831497943883759412e00,
                              9.3506656132177855979e01, 5.9727027639480026226e02,
                              2.4945375852903726711e03, 6.8481904505362823326e03,
                              1.1602651437647350124e04, 9.8427148383839780218e03,
                              1.0765576773720192317e-8};
  static const double d[8] = {2.2266688044328115691e01, 2.3538790178262499861e02,
                              1.5193775994075548050e03, 6.4855582982667607550e03,
                              1.8615571640885098091e04, 3.4900952721145977266e04,
                              3.8912003286093271411e04, 1.9685429676859990727e04};
  static const double p[6] = {2.1589853405795699e-1, 1.274011611602473639e-1,
                              2.2235277870649807e-2, 1.421619193227893466e-3,
                              2.9112874951168792e-5, 2.307344176494017303e-2};
  static const double q[5] = {1.28426009614491121e00, 4.68238212480865118e-1,
                              6.59881378689285515e-2, 3.78239633202758244e-3,
                              7.29751555083966205e-5};

  double y = std::fabs(x);
  double result;
  if (y <= 0.66291) {
    double z = 0.0, num = a[4] * 0.0, den = 0.0;
    if (y > 1e-10) {
      z = y * y;
      num = a[4] * z;
      den = z;
      for (int i = 0; i < 3; ++i) {
        num = (num + a[i]) * z;
        den = (den + b[i]) * z;
      }
    }
    result = 0.5 + y * (num + a[3]) / (den + b[3]);
    return x > 0.0 ? result : 1.0 - result;
  }
  if (y <= 5.656854249492380195206754896838) {  // sqrt(32)
    double num = c[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + c[i]) * y;
      den = (den + d[i]) * y;
    }
    result = (num + c[7]) / (den + d[7]);
    double ysq = std::floor(y * 16.0) / 16.0;
    double del = (y - ysq) * (y + ysq);
    result *= std::exp(-ysq * ysq * 0.5) * std::exp(-del * 0.5);
  } else {
    if (y > 38.0) {
      result = 0.0;
    } else {
      double z = 1.0 / (y * y);
      double num = p[5] * z;
      double den = z;
      for (int i = 0; i < 4; ++i) {
        num = (num + p[i]) * z;
        den = (den + q[i]) * z;
      }
      result = z * (num + p[4]) / (den + q[4]);
      result = (1.0 / kSqrt2Pi - result) / y;
      double ysq = std::floor(y * 16.0) / 16.0;
      double del = (y - ysq) * (y + ysq);
      result *= std::exp(-ysq * ysq * 0.5) * std::exp(-del * 0.5);
    }
  }
  return x > 0.0 ? 1.0 - result : result;
}

// Acklam's rational initial guess refined with one Halley step; relative
// error near machine precision away from the extreme tails.
double norm_quantile(double prob) {
  if (std::isnan(prob) || prob < 0.0 || prob > 1.0)
    throw std::invalid_argument("norm_quantile: p outside [0, 1]");
  if (prob == 0.0) return -kInf;
  if (prob == 1.0) return kInf;

  static const double pa[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
  static const double pb[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
  static const double pc[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
  static const double pd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

  const double plow = 0.02425;
  double x;
  if (prob < plow) {
    double qv = std::sqrt(-2.0 * std::log(prob));
    x = (((((pc[0] * qv + pc[1]) * qv + pc[2]) * qv + pc[3]) * qv + pc[4]) * qv + pc[5]) /
        ((((pd[0] * qv + pd[1]) * qv + pd[2]) * qv + pd[3]) * qv + 1.0);
  } else if (prob <= 1.0 - plow) {
    double qv = prob - 0.5;
    double rr = qv * qv;
    x = (((((pa[0] * rr + pa[1]) * rr + pa[2]) * rr + pa[3]) * rr + pa[4]) * rr + pa[5]) * qv /
        (((((pb[0] * rr + pb[1]) * rr + pb[2]) * rr + pb[3]) * rr + pb[4]) * rr + 1.0);
  } else {
    double qv = std::sqrt(-2.0 * std::log(1.0 - prob));
    x = -(((((pc[0] * qv + pc[1]) * qv + pc[2]) * qv + pc[3]) * qv + pc[4]) * qv + pc[5]) /
        ((((pd[0] * qv + pd[1]) * qv + pd[2]) * qv + pd[3]) * qv + 1.0);
  }
  // Halley refinement against norm_cdf. Skipped in the far tails where the
  // density reciprocal overflows; the initial guess is already close there.
  if (0.5 * x * x < 700.0) {
    double e = norm_cdf(x) - prob;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double bvn_cdf(double h, double k, double rho) {
  if (std::isnan(h) || std::isnan(k) || std::isnan(rho))
    throw std::invalid_argument("bvn_cdf: NaN argument");
  if (std::fabs(rho) > 1.0 + 1e-9)
    throw std::invalid_argument("bvn_cdf: |rho| exceeds 1");
  rho = std::min(1.0, std::max(-1.0, rho));
  return bvn_upper(-h, -k, rho);
}

namespace {

// Node fractions (1 -+ x_i)/2 and duplicated weights, interleaved over both
// half-ranges and zero-padded to a packet multiple. Padded lanes yield
// theta = 0, sine 0, weight 0, so they drop out of every downstream sum.
struct AngularNodes {
  BvnAngular::Nodes u;
  BvnAngular::Nodes w;
};

AngularNodes make_nodes(const double* gx, const double* gw, int ng) {
  AngularNodes nodes;
  nodes.u.setZero();
  nodes.w.setZero();
  for (int i = 0; i < ng; ++i) {
    nodes.u[2 * i] = (1.0 - gx[i]) / 2.0;
    nodes.u[2 * i + 1] = (1.0 + gx[i]) / 2.0;
    nodes.w[2 * i] = gw[i];
    nodes.w[2 * i + 1] = gw[i];
  }
  return nodes;
}

const AngularNodes kNodes6 = make_nodes(kGl6X, kGl6W, 3);
const AngularNodes kNodes12 = make_nodes(kGl12X, kGl12W, 6);
const AngularNodes kNodes20 = make_nodes(kGl20X, kGl20W, 10);

// Node angles stay inside |x| <= asin(0.925) ~ 1.184, where the odd Taylor
// polynomial through x^19 is exact to below 1e-18 relative. N covers n2
// rounded up to a packet multiple; lanes past N are left untouched and the
// evaluation dispatch never reads them.
template <int N>
void prepare_lanes(const AngularNodes& nodes, double asr, BvnAngular& out) {
  using Lanes = Eigen::Array<double, N, 1>;
  Lanes th = asr * nodes.u.head<N>();
  Lanes t = th * th;
  Lanes q = t * (-1.5619206968586225e-17) + 2.8114572543455206e-15;
  q = q * t - 7.6471637318198164e-13;
  q = q * t + 1.6059043836821613e-10;
  q = q * t - 2.5052108385441720e-08;
  q = q * t + 2.7557319223985893e-06;
  q = q * t - 1.9841269841269841e-04;
  q = q * t + 8.3333333333333332e-03;
  q = q * t - 1.6666666666666666e-01;
  out.sn.head<N>() = th + th * t * q;
  out.inv_omc.head<N>() = (1.0 - out.sn.head<N>().square()).inverse();
  out.wt.head<N>() = nodes.w.head<N>();
}

}  // namespace

void bvn_angular_prepare(double rho, BvnAngular& out) {
  out.rho = std::min(1.0, std::max(-1.0, rho));
  out.fast = false;
  double ar = std::fabs(out.rho);
  if (ar >= 0.925) return;

  out.asr = std::asin(out.rho);
  out.fast = true;
  if (ar < 0.3) {
    out.n2 = 6;
    prepare_lanes<8>(kNodes6, out.asr, out);
  } else if (ar < 0.75) {
    out.n2 = 12;
    prepare_lanes<12>(kNodes12, out.asr, out);
  } else {
    out.n2 = 20;
    prepare_lanes<20>(kNodes20, out.asr, out);
  }
}

namespace {

// Compile-time extent keeps Eigen on packet exp; N pads n2 up to a packet
// multiple, and the zero weights on padded lanes cancel their contribution.
template <int N>
double fused_quad(const BvnAngular& ang, double hk_lo, double hs_lo,
                  double hk_hi, double hs_hi) {
  auto sn = ang.sn.head<N>();
  auto inv_omc = ang.inv_omc.head<N>();
  auto wt = ang.wt.head<N>();
  return (wt * (((sn * hk_hi - hs_hi) * inv_omc).exp() -
                ((sn * hk_lo - hs_lo) * inv_omc).exp()))
      .sum();
}

}  // namespace

double bvn_cdf_interval(const BvnAngular& ang, double e, double f_lo,
                        double f_hi, double p_e, double p_lo, double p_hi) {
  if (ang.rho == 1.0) {
    // Comonotone pair: the joint CDF is the smaller marginal.
    return std::max(0.0, std::min(p_e, p_hi) - std::min(p_e, p_lo));
  }
  if (ang.rho == -1.0) {
    return std::max(0.0, std::max(0.0, p_e + p_hi - 1.0) -
                             std::max(0.0, p_e + p_lo - 1.0));
  }
  if (!ang.fast)
    return std::max(0.0, bvn_cdf(e, f_hi, ang.rho) - bvn_cdf(e, f_lo, ang.rho));

  double hs_lo = (e * e + f_lo * f_lo) / 2.0;
  double hs_hi = (e * e + f_hi * f_hi) / 2.0;
  double hk_lo = e * f_lo;
  double hk_hi = e * f_hi;
  double sum;
  if (ang.n2 <= 8)
    sum = fused_quad<8>(ang, hk_lo, hs_lo, hk_hi, hs_hi);
  else if (ang.n2 <= 12)
    sum = fused_quad<12>(ang, hk_lo, hs_lo, hk_hi, hs_hi);
  else
    sum = fused_quad<20>(ang, hk_lo, hs_lo, hk_hi, hs_hi);
  double term = sum * ang.asr / (2.0 * kTwoPi) + p_e * (p_hi - p_lo);
  return std::max(term, 0.0);
}

TruncMoments trunc_norm_moments(double mu, double sigma, double lo, double hi) {
  if (!(sigma > 0.0) || std::isnan(mu))
    throw std::invalid_argument("trunc_norm_moments: need sigma > 0");
  if (!(lo < hi))
    throw std::invalid_argument("trunc_norm_moments: need lo < hi");

  double a = (lo - mu) / sigma;
  double b = (hi - mu) / sigma;

  // Complement form keeps the mass accurate when the interval sits in a tail.
  double mass;
  if (a > 0.0) {
    mass = norm_cdf(-a) - norm_cdf(-b);
  } else {
    mass = norm_cdf(b) - norm_cdf(a);
  }
  if (!(mass >= 1e-300))
    throw std::runtime_error("trunc_norm_moments: interval mass underflow");
  mass = std::min(mass, 1.0);

  double pa = std::isinf(a) ? 0.0 : norm_pdf(a);
  double pb = std::isinf(b) ? 0.0 : norm_pdf(b);
  double apa = std::isinf(a) ? 0.0 : a * pa;
  double bpb = std::isinf(b) ? 0.0 : b * pb;

  double width = b - a;
  double lambda, delta;
  if (width < 1e-9) {
    // Narrow interval: the conditional law is effectively uniform on it.
    double mid = 0.5 * (a + b);
    TruncMoments out;
    out.mass = mass;
    out.mean = mu + sigma * mid;
    out.variance = sigma * sigma * width * width / 12.0;
    return out;
  }
  lambda = (pa - pb) / mass;
  delta = (apa - bpb) / mass;

  TruncMoments out;
  out.mass = mass;
  out.mean = mu + sigma * lambda;
  double v = 1.0 + delta - lambda * lambda;
  v = std::min(1.0, std::max(0.0, v));
  out.variance = sigma * sigma * v;
  return out;
}

}  // namespace surq
