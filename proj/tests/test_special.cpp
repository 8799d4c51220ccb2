#include "usplit/special.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace sp = usplit::special;

namespace {

// Mixed absolute/relative closeness check against an independently computed
// high-precision reference value.
void expect_close(double actual, double expected, double rtol,
                  double atol = 0.0) {
  EXPECT_NEAR(actual, expected, atol + rtol * std::fabs(expected))
      << "actual=" << actual << " expected=" << expected;
}

}  // namespace

// References for erfc computed with 50-digit arithmetic (mpmath) and rounded
// to double.
TEST(Special, ErfcFrozenValues) {
  EXPECT_EQ(sp::erfc(0.0), 1.0);
  expect_close(sp::erfc(1e-8), 0.99999998871620832904, 5e-15);
  expect_close(sp::erfc(0.1), 0.8875370839817151016, 5e-14);
  expect_close(sp::erfc(0.25), 0.72367360983176306701, 5e-14);
  expect_close(sp::erfc(0.46875), 0.50738652678206200841, 5e-14);
  expect_close(sp::erfc(0.75), 0.2888443663464848684, 5e-14);
  expect_close(sp::erfc(1.0), 0.15729920705028513066, 5e-14);
  expect_close(sp::erfc(1.5), 0.033894853524689272933, 5e-14);
  expect_close(sp::erfc(2.0), 0.0046777349810472658379, 5e-14);
  expect_close(sp::erfc(3.0), 2.2090496998585441373e-5, 5e-14);
  expect_close(sp::erfc(4.0), 1.5417257900280018852e-8, 5e-14);
  expect_close(sp::erfc(5.0), 1.5374597944280348502e-12, 5e-14);
  expect_close(sp::erfc(6.5), 3.8421483271206474699e-20, 5e-14);
  expect_close(sp::erfc(10.0), 2.088487583762544757e-45, 5e-14);
  expect_close(sp::erfc(15.0), 7.2129941724512066666e-100, 5e-14);
  expect_close(sp::erfc(26.5), 2.2109076642637342759e-307, 5e-13);
  EXPECT_EQ(sp::erfc(27.0), 0.0);
  expect_close(sp::erfc(-0.5), 1.5204998778130465377, 5e-15);
  expect_close(sp::erfc(-1.0), 1.8427007929497148693, 5e-15);
  expect_close(sp::erfc(-2.5), 1.9995930479825550411, 5e-15);
  expect_close(sp::erfc(-5.0), 1.9999999999984625402, 5e-15);
}

TEST(Special, ErfSymmetryAndSmallArguments) {
  expect_close(sp::erf(0.25), 0.27632639016823693299, 5e-14);
  expect_close(sp::erf(1.0), 0.84270079294971486934, 5e-14);
  expect_close(sp::erf(-1.0), -0.84270079294971486934, 5e-14);
  // Linear regime: erf(x) ~ 2x/sqrt(pi).
  expect_close(sp::erf(1e-9), 1.1283791670955125739e-9, 1e-13);
  EXPECT_EQ(sp::erf(0.0), 0.0);
  for (double x : {0.1, 0.46875, 0.7, 1.3, 3.9, 4.1, 8.0}) {
    EXPECT_DOUBLE_EQ(sp::erf(-x), -sp::erf(x)) << "x=" << x;
    expect_close(sp::erf(x) + sp::erfc(x), 1.0, 1e-15);
  }
}

// Phi references from 50-digit arithmetic.
TEST(Special, NormalCdfFrozenValues) {
  expect_close(sp::norm_cdf(-5.0), 2.8665157187919391e-7, 5e-14);
  expect_close(sp::norm_cdf(-3.0), 0.0013498980316300945, 5e-14);
  expect_close(sp::norm_cdf(-1.0), 0.15865525393145705, 5e-14);
  expect_close(sp::norm_cdf(-0.5), 0.3085375387259869, 5e-14);
  EXPECT_EQ(sp::norm_cdf(0.0), 0.5);
  expect_close(sp::norm_cdf(0.31623), 0.62408603074129652, 5e-14);
  expect_close(sp::norm_cdf(1.0), 0.84134474606854295, 5e-14);
  expect_close(sp::norm_cdf(2.0), 0.97724986805182079, 5e-14);
  expect_close(sp::norm_cdf(4.0), 0.99996832875816688, 5e-14);
  // Value used by the normal-approximation CDF of the limit distribution:
  // Phi((-2 ln 0.05 - 11) / sqrt(122)).
  const double z = (-2.0 * std::log(0.05) - 11.0) / std::sqrt(122.0);
  expect_close(sp::norm_cdf(z), 0.32511183202704518, 1e-13);
}

TEST(Special, NormalQuantile) {
  expect_close(sp::norm_quantile(0.95), 1.6448536269514727, 1e-12);
  expect_close(sp::norm_quantile(0.995), 2.5758293035489008, 1e-12);
  expect_close(sp::norm_quantile(0.5), 0.0, 0.0, 1e-13);
  for (double p : {0.01, 0.2, 0.77, 0.999}) {
    expect_close(sp::norm_cdf(sp::norm_quantile(p)), p, 1e-12);
  }
  EXPECT_THROW(sp::norm_quantile(0.0), std::invalid_argument);
  EXPECT_THROW(sp::norm_quantile(1.0), std::invalid_argument);
}

// References from mpmath.gammainc(a, 0, x, regularized=True).
TEST(Special, RegularizedLowerGammaFrozenValues) {
  expect_close(sp::gamma_p(0.5, 0.25), 0.52049987781304654, 1e-13);
  expect_close(sp::gamma_p(3.0, 2.0), 0.32332358381693654, 1e-13);
  expect_close(sp::gamma_p(27.0, 36.07661094528964), 0.95000004688275218,
               1e-13);
  expect_close(sp::gamma_p(5.0, 1.0), 0.0036598468273437123, 1e-13);
  expect_close(sp::gamma_p(0.5, 12.5), 0.99999942669685624, 1e-13);
  EXPECT_EQ(sp::gamma_p(2.0, 0.0), 0.0);
  EXPECT_THROW(sp::gamma_p(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(sp::gamma_p(1.0, -1.0), std::invalid_argument);
}

// References from scipy.stats.chi2.
TEST(Special, ChiSquareCdfFrozenValues) {
  expect_close(sp::chi2_cdf(0.5, 6.0), 0.002161496689762513, 1e-13);
  expect_close(sp::chi2_cdf(25.0, 10.0), 0.9946544945128659, 1e-13);
  EXPECT_EQ(sp::chi2_cdf(0.0, 3.0), 0.0);
  EXPECT_EQ(sp::chi2_cdf(-1.0, 3.0), 0.0);
}

// 95% quantiles from scipy.stats.chi2.ppf(0.95, k).
TEST(Special, ChiSquareQuantileFrozenValues) {
  expect_close(sp::chi2_quantile(0.95, 1.0), 3.841458820694124, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 2.0), 5.991464547107979, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 3.0), 7.814727903251179, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 4.0), 9.487729036781154, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 5.0), 11.070497693516351, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 6.0), 12.591587243743977, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 8.0), 15.50731305586545, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 10.0), 18.307038053275146, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 54.0), 72.15321616702309, 1e-10);
  expect_close(sp::chi2_quantile(0.95, 60.0), 79.08194448784874, 1e-10);
  EXPECT_EQ(sp::chi2_quantile(0.0, 4.0), 0.0);
  EXPECT_THROW(sp::chi2_quantile(1.0, 4.0), std::invalid_argument);
}

TEST(Special, ChiSquareRoundTrip) {
  for (double k : {1.0, 3.0, 10.0, 54.0}) {
    for (double p : {0.01, 0.5, 0.9, 0.99}) {
      expect_close(sp::chi2_cdf(sp::chi2_quantile(p, k), k), p, 1e-11);
    }
  }
}

// c(alpha) = sqrt(-ln(alpha/2)/2); with n = m = 2 the size factor is 1.
TEST(Special, KolmogorovSmirnovCritical) {
  expect_close(sp::ks_two_sample_critical(0.01, 2, 2), 1.6276236307187293,
               1e-14);
  expect_close(sp::ks_two_sample_critical(0.05, 2, 2), 1.3581015157406195,
               1e-14);
  expect_close(sp::ks_two_sample_critical(0.01, 10000, 100000),
               1.6276236307187293 * std::sqrt(110000.0 / 1.0e9), 1e-13);
  EXPECT_THROW(sp::ks_two_sample_critical(0.0, 2, 2), std::invalid_argument);
  EXPECT_THROW(sp::ks_two_sample_critical(0.01, 0, 2), std::invalid_argument);
}
