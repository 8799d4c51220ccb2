#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace usplit {

// Golden-section minimization on [lo, hi] to absolute x-tolerance tol.
// Deterministic bracket updates; on piecewise-constant objectives it settles
// on a point of the flat minimizing region.
template <class F>
double golden_section_minimize(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Index-based coarse grid scan (ties break toward the smaller argument),
// then golden-section refinement within one grid cell on each side of the
// winner.  The refined point replaces the grid winner only when strictly
// better, so flat objectives keep the deterministic grid answer.
// Returns {argmin, min}.
template <class F>
std::pair<double, double> grid_then_golden(F&& f, double lo, double hi,
                                           double step, double tol) {
  const auto n_steps = static_cast<long>(std::lround((hi - lo) / step));
  double best_x = lo, best_f = f(lo);
  for (long i = 1; i <= n_steps; ++i) {
    const double x = std::min(lo + static_cast<double>(i) * step, hi);
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  const double a = std::max(lo, best_x - step);
  const double b = std::min(hi, best_x + step);
  const double xr = golden_section_minimize(f, a, b, tol);
  const double fr = f(xr);
  if (fr < best_f) return {xr, fr};
  return {best_x, best_f};
}

}  // namespace usplit
