#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace usplit {

// Raised when an iterative fit fails to reach its convergence tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection threshold -2 ln(alpha) of the universal e-value test.
inline double universal_threshold(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("universal_threshold: alpha must be in (0,1)");
  }
  return -2.0 * std::log(alpha);
}

// Parameters of the limiting distribution of the split statistic.
//   d     - free parameters in the full model
//   p     - number of parameters constrained to zero under the null (0..d);
//           the mean-shift direction h lives in R^p, so p = 0 forces delta = 0
//   m0    - fraction of observations used to evaluate the statistic
//   delta - noncentrality: squared norm of the constrained block of the
//           local-alternative direction
struct SplitChiSqParams {
  std::size_t d = 1;
  std::size_t p = 1;
  double m0 = 0.5;
  double delta = 0.0;

  double m1() const { return 1.0 - m0; }
};

// Validates and returns params; m0 is clamped to [0.01, 0.99] so callers can
// pass boundary-adjacent search values without blowing up the m0/m1 ratios.
inline SplitChiSqParams make_params(std::size_t d, std::size_t p, double m0,
                                    double delta) {
  if (d < 1) throw std::invalid_argument("params: d must be >= 1");
  if (p > d) throw std::invalid_argument("params: p must be in [0, d]");
  if (!std::isfinite(m0)) throw std::invalid_argument("params: m0 not finite");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("params: delta must be finite and >= 0");
  }
  if (p == 0 && delta != 0.0) {
    throw std::invalid_argument("params: p = 0 requires delta = 0");
  }
  SplitChiSqParams out;
  out.d = d;
  out.p = p;
  out.m0 = std::fmin(std::fmax(m0, 0.01), 0.99);
  out.delta = delta;
  return out;
}

// First two moments of a distribution.
struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
};

}  // namespace usplit
