#include "usplit/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace usplit::special {
namespace {

// Coefficients from Cody's near-minimax rational approximations
// (Math. Comp. 23 (1969), 631-638), double-precision variant.

// erf on |x| <= 0.46875
constexpr double kA[5] = {3.1611237438705656, 113.864154151050156,
                          377.485237685302021, 3209.37758913846947,
                          0.185777706184603153};
constexpr double kB[4] = {23.6012909523441209, 244.024637934444173,
                          1282.61652607737228, 2844.23683343917062};

// exp(x*x) * erfc(x) on 0.46875 <= x <= 4
constexpr double kC[9] = {0.564188496988670089, 8.88314979438837594,
                          66.1191906371416295,  298.635138197400131,
                          881.95222124176909,   1712.04761263407058,
                          2051.07837782607147,  1230.33935479799725,
                          2.15311535474403846e-8};
constexpr double kD[8] = {15.7449261107098347, 117.693950891312499,
                          537.181101862009858, 1621.38957456669019,
                          3290.79923573345963, 4362.61909014324716,
                          3439.36767414372164, 1230.33935480374942};

// exp(x*x) * erfc(x) on x > 4
constexpr double kP[6] = {0.305326634961232344, 0.360344899949804439,
                          0.125781726111229246, 0.0160837851487422766,
                          6.58749161529837803e-4, 0.0163153871373020978};
constexpr double kQ[5] = {2.56852019228982242, 1.87295284992346047,
                          0.527905102951428412, 0.0605183413124413191,
                          0.00233520497626869185};

constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1/sqrt(pi)
constexpr double kSmallCut = 0.46875;
constexpr double kTinyArg = 1.11e-16;   // below this, erf(x) ~ 2x/sqrt(pi)
constexpr double kErfcZeroAt = 26.543;  // erfc underflows to 0 beyond this

// exp(-y*y) evaluated as exp(-hi*hi) * exp(-(y-hi)*(y+hi)) with hi equal to
// y truncated at 1/16 granularity, so each exponent is exactly representable
// enough to keep the tail's relative error near machine epsilon.
double exp_neg_square(double y) {
  const double hi = std::trunc(y * 16.0) / 16.0;
  const double del = (y - hi) * (y + hi);
  return std::exp(-hi * hi) * std::exp(-del);
}

// erf(x) on |x| <= 0.46875 (odd function; sign carried by x).
double erf_small(double x) {
  const double y = std::fabs(x);
  const double ysq = (y > kTinyArg) ? y * y : 0.0;
  double xnum = kA[4] * ysq;
  double xden = ysq;
  for (int i = 0; i < 3; ++i) {
    xnum = (xnum + kA[i]) * ysq;
    xden = (xden + kB[i]) * ysq;
  }
  return x * (xnum + kA[3]) / (xden + kB[3]);
}

// erfc(y) for 0.46875 < y <= 4.
double erfc_mid(double y) {
  double xnum = kC[8] * y;
  double xden = y;
  for (int i = 0; i < 7; ++i) {
    xnum = (xnum + kC[i]) * y;
    xden = (xden + kD[i]) * y;
  }
  const double r = (xnum + kC[7]) / (xden + kD[7]);
  return exp_neg_square(y) * r;
}

// erfc(y) for y > 4.
double erfc_far(double y) {
  if (y >= kErfcZeroAt) return 0.0;
  const double ysq = 1.0 / (y * y);
  double xnum = kP[5] * ysq;
  double xden = ysq;
  for (int i = 0; i < 4; ++i) {
    xnum = (xnum + kP[i]) * ysq;
    xden = (xden + kQ[i]) * ysq;
  }
  double r = ysq * (xnum + kP[4]) / (xden + kQ[4]);
  r = (kInvSqrtPi - r) / y;
  return exp_neg_square(y) * r;
}

// erfc(y) for y >= 0.
double erfc_nonneg(double y) {
  if (y <= kSmallCut) return 1.0 - erf_small(y);
  if (y <= 4.0) return erfc_mid(y);
  return erfc_far(y);
}

constexpr int kMaxGammaIter = 500;
constexpr double kGammaEps = 1e-16;

// P(a, x) by power series; converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxGammaIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kGammaEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("gamma_p: series did not converge");
}

// Q(a, x) by modified Lentz continued fraction; converges fast for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  constexpr double kFloor = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kFloor;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxGammaIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFloor) d = kFloor;
    c = b + an / c;
    if (std::fabs(c) < kFloor) c = kFloor;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kGammaEps) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("gamma_p: continued fraction did not converge");
}

}  // namespace

double erf(double x) {
  const double y = std::fabs(x);
  if (y <= kSmallCut) return erf_small(x);
  const double c = erfc_nonneg(y);
  const double r = (0.5 - c) + 0.5;
  return (x < 0.0) ? -r : r;
}

double erfc(double x) {
  if (x < 0.0) return 2.0 - erfc_nonneg(-x);
  return erfc_nonneg(x);
}

double norm_cdf(double x) { return 0.5 * erfc(-x * 0.7071067811865475244); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("norm_quantile: p must be in (0, 1)");
  }
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (norm_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x)) {
    throw std::invalid_argument("gamma_p: requires a > 0 and finite x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_cdf(double x, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("chi2_cdf: k must be positive");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * k, 0.5 * x);
}

double chi2_quantile(double p, double k) {
  if (!(k > 0.0)) {
    throw std::invalid_argument("chi2_quantile: k must be positive");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("chi2_quantile: p must be in [0, 1)");
  }
  if (p == 0.0) return 0.0;
  double hi = k + 10.0 * std::sqrt(2.0 * k) + 10.0;
  while (chi2_cdf(hi, k) < p) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, k) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0 || m == 0) {
    throw std::invalid_argument("ks_two_sample_critical: bad arguments");
  }
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace usplit::special
