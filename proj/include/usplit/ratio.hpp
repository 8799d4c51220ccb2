#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "usplit/types.hpp"

// Choice of the data-splitting fraction m0.  The sized-down part D0 (a
// fraction m0 of the sample) evaluates the statistic; the rest fits the
// alternative.  The search asks: against the weakest local alternative that
// is detectable at all (the smallest noncentrality delta reaching the target
// power), which m0 maximizes power?
namespace usplit {

struct SplitSearchConfig {
  double alpha = 0.05;
  double target_power = 0.8;
  // Geometric schedule for the noncentrality: start at max(1, p), multiply
  // by delta_growth, give up past delta_cap.
  double delta_growth = 1.25;
  double delta_cap = 1e9;
  // m0 search grid and refinement tolerance.
  double grid_lo = 0.05;
  double grid_hi = 0.95;
  double grid_step = 0.01;
  double refine_tol = 1e-4;
  // Monte Carlo searches only.
  std::size_t n_reps = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct SplitRatioResult {
  double m0_opt = 0.5;
  double achieved_power = 0.0;
  double delta_used = 0.0;
  std::string method;
};

// Power searched under the moment-matched normal approximation of the limit
// law (deterministic, no sampling).
SplitRatioResult optimal_split_normal(std::size_t d, std::size_t p,
                                      const SplitSearchConfig& config = {});

// Same search with power estimated by Monte Carlo draws of the exact limit
// law; one batch of common random numbers serves every (m0, delta) probe.
SplitRatioResult optimal_split_mc(std::size_t d, std::size_t p,
                                  const SplitSearchConfig& config = {});

// Monte Carlo search for the cross-fit statistic (equal weights).
SplitRatioResult optimal_split_crossfit(std::size_t d, std::size_t p,
                                        const SplitSearchConfig& config = {});

// Closed-form fraction minimizing a worst-case normal-family power bound:
//   m0 = 1 - (sqrt(4 d^2 + 8 d ln(1/alpha)) - 2 d) / (4 ln(1/alpha)).
double worst_case_split(std::size_t d, double alpha);

// Piecewise-smooth fit to tabulated optimal fractions, in terms of the
// dimension k = d - p of the null model (0 <= k <= d):
//   m0 = 0.52 - exp(-2.7 k / d - 1.05).
double rule_of_thumb_split(std::size_t d, std::size_t k);

}  // namespace usplit
