#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "usplit/sim/csv.hpp"

namespace usplit::sim {

// Run fn(i) for i in [0, n) on up to `threads` workers over contiguous
// chunks.  Callers key all randomness on the index, so results do not depend
// on the worker count.  The first exception thrown by any worker is
// rethrown.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

// Deterministic per-replication seed derived from (study seed, study tag,
// replication index); used wherever a replication needs a seed of its own
// (e.g. for data splits) rather than a random stream.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t tag,
                               std::uint64_t rep);

// Monte Carlo (1 - alpha) quantiles of the null limit distribution next to
// the universal threshold -2 ln alpha.  Two rows per (p, m0, alpha): methods
// "quantile-a<alpha>" and "threshold-a<alpha>" (se = 0 on both).
std::vector<CsvRow> run_quantile_study(std::size_t d,
                                       const std::vector<std::size_t>& p_list,
                                       const std::vector<double>& m0_grid,
                                       const std::vector<double>& alpha_list,
                                       std::size_t n_reps, std::uint64_t seed,
                                       int threads);

// Gaussian-location power against sample size for the classical test
// ("lrt"), the split test at the universal threshold ("slrt-m<m0>"), and the
// split test at the Monte Carlo quantile of its null limit
// ("asym-slrt-m<m0>").
std::vector<CsvRow> run_power_vs_n(std::size_t d, std::size_t k, double theta,
                                   const std::vector<std::size_t>& n_grid,
                                   const std::vector<double>& m0_list,
                                   double alpha, std::size_t n_reps,
                                   std::uint64_t seed, int threads);

// Power of the split test against the splitting ratio, sampling the limit
// distribution directly at noncentrality delta.
std::vector<CsvRow> run_power_vs_split(std::size_t d,
                                       const std::vector<std::size_t>& p_list,
                                       double delta, double alpha,
                                       const std::vector<double>& m0_grid,
                                       std::size_t n_reps, std::uint64_t seed,
                                       int threads);

// How the null-model dimension k scales with d in the split comparison.
enum class KRule { fixed_five, d_over_six };

// How the noncentrality is chosen per dimension: a fixed value, or the
// smallest delta at which the normal-approximation-optimal split reaches a
// target power.
struct DeltaRule {
  bool calibrated = false;
  double value = 100.0;  // fixed delta, or the target power when calibrated
};

// Splitting ratios from the four selection methods ("algo1", "mc", "eq5",
// "thumb"; "<method>-ratio" rows, se = 0) and their limit powers
// ("<method>" rows) per dimension, under common random numbers.
std::vector<CsvRow> run_optimal_split_comparison(
    const std::vector<std::size_t>& d_grid, KRule k_rule, double alpha,
    const DeltaRule& delta_rule, std::size_t n_reps, std::uint64_t seed,
    int threads);

// One-factor analysis power study over the second-factor strength h, for
// both the regular (three strong loadings) and irregular (two strong
// loadings) truths.  Methods: "slrt-m0.41", "slrt-m0.51",
// "crossfit-m0.50-w0.50", "crossfit-m0.41-w{0.25,0.50,0.75}", and
// "subsample-m0.41-j2".  Replications where a required fit does not converge
// count as non-rejections and are reported in "<method>:nonconv" rows.
std::vector<CsvRow> run_factor_study(const std::vector<double>& h_grid,
                                     std::size_t n, double alpha,
                                     std::size_t n_reps, std::uint64_t seed,
                                     int threads);

}  // namespace usplit::sim
