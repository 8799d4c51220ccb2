#pragma once

#include <cstddef>

namespace usplit::special {

// Error function and its complement. Rational minimax approximations
// (W. J. Cody, "Rational Chebyshev approximations for the error function",
// Math. Comp. 23 (1969), 631-638); relative accuracy near machine epsilon
// over the full double range, including the far tail where erfc underflows
// gracefully to 0 around x ~ 26.54.
double erf(double x);
double erfc(double x);

// Standard normal CDF: Phi(x) = erfc(-x / sqrt(2)) / 2.
double norm_cdf(double x);

// Standard normal quantile, p in (0, 1). Bisection on norm_cdf; absolute
// accuracy ~1e-13.
double norm_quantile(double p);

// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
// Power series for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

// Chi-square CDF with k > 0 degrees of freedom: P(k/2, x/2).
double chi2_cdf(double x, double k);

// Chi-square quantile, p in [0, 1). Bisection on chi2_cdf.
double chi2_quantile(double p, double k);

// Critical value for the two-sample Kolmogorov-Smirnov statistic at level
// alpha: c(alpha) * sqrt((n + m) / (n * m)) with c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m);

}  // namespace usplit::special
