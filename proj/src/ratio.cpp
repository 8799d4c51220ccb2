#include "usplit/ratio.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "usplit/optim.hpp"
#include "usplit/rng.hpp"
#include "usplit/special.hpp"
#include "usplit/splitchisq.hpp"

namespace usplit {

namespace {

void check_search_config(std::size_t d, std::size_t p,
                         const SplitSearchConfig& cfg) {
  (void)make_params(d, p, 0.5, 0.0);
  (void)universal_threshold(cfg.alpha);
  if (p == 0) {
    // No constrained direction means delta is pinned at 0 and power can never
    // exceed the level; the schedule would walk to its cap and fail.
    throw NonConvergenceError(
        "optimal split search: p = 0 admits no local alternative");
  }
  if (!(cfg.target_power > 0.0 && cfg.target_power < 1.0)) {
    throw std::invalid_argument("search: target_power must be in (0, 1)");
  }
  if (!(cfg.delta_growth > 1.0)) {
    throw std::invalid_argument("search: delta_growth must exceed 1");
  }
  if (!(cfg.grid_lo >= 0.01 && cfg.grid_hi <= 0.99 &&
        cfg.grid_lo < cfg.grid_hi && cfg.grid_step > 0.0)) {
    throw std::invalid_argument("search: bad m0 grid");
  }
}

// Walks the geometric delta schedule; at each delta minimizes the
// non-rejection probability over m0 and stops at the first delta whose
// maximized power reaches the target.
template <class NonRejectFn>
SplitRatioResult schedule_search(std::size_t p, const SplitSearchConfig& cfg,
                                 NonRejectFn&& non_reject) {
  double delta = std::fmax(1.0, static_cast<double>(p));
  while (delta <= cfg.delta_cap) {
    const auto [m0, cdf] = grid_then_golden(
        [&](double m0_probe) { return non_reject(m0_probe, delta); },
        cfg.grid_lo, cfg.grid_hi, cfg.grid_step, cfg.refine_tol);
    if (cdf <= 1.0 - cfg.target_power) {
      return {m0, 1.0 - cdf, delta};
    }
    delta *= cfg.delta_growth;
  }
  throw NonConvergenceError(
      "optimal split search: no delta below the cap reaches target power " +
      std::to_string(cfg.target_power));
}

}  // namespace

SplitRatioResult optimal_split_normal(std::size_t d, std::size_t p,
                                      const SplitSearchConfig& cfg) {
  check_search_config(d, p, cfg);
  const double thr = universal_threshold(cfg.alpha);
  auto out = schedule_search(p, cfg, [&](double m0, double delta) {
    return normal_approx_cdf(thr, make_params(d, p, m0, delta));
  });
  out.method = "normal-approx";
  return out;
}

SplitRatioResult optimal_split_mc(std::size_t d, std::size_t p,
                                  const SplitSearchConfig& cfg) {
  check_search_config(d, p, cfg);
  const double thr = universal_threshold(cfg.alpha);
  const LimitBatch batch(d, p, cfg.n_reps, cfg.seed,
                         random::stream_tag("ratio-search"), cfg.threads);
  auto out = schedule_search(p, cfg, [&](double m0, double delta) {
    return 1.0 - batch.split_exceed_fraction(m0, delta, thr);
  });
  out.method = "monte-carlo";
  return out;
}

SplitRatioResult optimal_split_crossfit(std::size_t d, std::size_t p,
                                        const SplitSearchConfig& cfg) {
  check_search_config(d, p, cfg);
  const double thr = universal_threshold(cfg.alpha);
  const LimitBatch batch(d, p, cfg.n_reps, cfg.seed,
                         random::stream_tag("ratio-search"), cfg.threads);
  auto out = schedule_search(p, cfg, [&](double m0, double delta) {
    return 1.0 - batch.crossfit_exceed_fraction(m0, delta, 0.5, thr);
  });
  out.method = "crossfit-mc";
  return out;
}

double worst_case_split(std::size_t d, double alpha) {
  if (d < 1) throw std::invalid_argument("worst_case_split: d must be >= 1");
  (void)universal_threshold(alpha);  // validates alpha
  const double log_inv = -std::log(alpha);
  const double dd = static_cast<double>(d);
  const double root = std::sqrt(4.0 * dd * dd + 8.0 * dd * log_inv);
  return 1.0 - (root - 2.0 * dd) / (4.0 * log_inv);
}

double rule_of_thumb_split(std::size_t d, std::size_t k) {
  if (d < 1 || k > d) {
    throw std::invalid_argument("rule_of_thumb_split: need 1 <= d and k <= d");
  }
  const double dd = static_cast<double>(d);
  return 0.52 - std::exp(-2.7 * static_cast<double>(k) / dd - 1.05);
}

}  // namespace usplit
