#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "usplit/rng.hpp"
#include "usplit/types.hpp"

// The limiting distribution of the split likelihood-ratio statistic under
// local alternatives:
//
//   T = ||X_[p] + sqrt(m0) h||^2 - ||X - sqrt(m0/m1) Y||^2,
//
// with X, Y independent N_d(0, I), h in R^p, delta = ||h||^2, and the
// cross-fit variant that averages T with its statistic under the roles of the
// two parts exchanged (one shared (X, Y) pair).
namespace usplit {

// Closed-form mean and variance.
MomentSummary split_limit_moments(const SplitChiSqParams& params);
// Cross-fit moments: closed forms at equal weights; any other weight w0 on
// the m0-direction term is computed through the quadratic-form oracle (no
// closed forms exist for the reweighted statistic).
MomentSummary crossfit_limit_moments(const SplitChiSqParams& params,
                                     double w0 = 0.5);

// Normal approximation to P(T <= x) by moment matching.
double normal_approx_cdf(double x, const SplitChiSqParams& params);

// Single draws.  The direction overloads take an explicit h (size p, with
// ||h||^2 taking the role of delta); the law depends on h only through its
// norm, which rotation-invariance tests exercise.
double sample_split_limit(const SplitChiSqParams& params,
                          random::Xoshiro256pp& rng);
double sample_crossfit_limit(const SplitChiSqParams& params, double w0,
                             random::Xoshiro256pp& rng);
double sample_split_limit_direction(std::size_t d, std::size_t p, double m0,
                                    const std::vector<double>& h,
                                    random::Xoshiro256pp& rng);

// Batch of replications cached as seven per-replication summaries of the
// underlying (X, Y) pair.  Draws of either statistic for ANY (m0, delta, w0)
// are affine in these summaries, so a single batch serves a whole grid search
// under common random numbers.  Replication i always uses substream
// (seed, tag, i), independent of threading.
class LimitBatch {
 public:
  LimitBatch(std::size_t d, std::size_t p, std::size_t n_reps,
             std::uint64_t seed, std::uint64_t tag, int threads = 1);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  std::size_t constrained() const { return p_; }

  // Fills out[0..n) with per-replication draws.
  void split_draws(double m0, double delta, double* out) const;
  void crossfit_draws(double m0, double delta, double w0, double* out) const;

  // Fraction of draws strictly greater than thr.
  double split_exceed_fraction(double m0, double delta, double thr) const;
  double crossfit_exceed_fraction(double m0, double delta, double w0,
                                  double thr) const;

 private:
  void combine_split(double m0, double delta, double* out) const;
  void combine_crossfit(double m0, double delta, double w0, double* out) const;

  std::size_t d_, p_, n_;
  // ||X||^2, ||Y||^2, X.Y, ||X_[p]||^2, ||Y_[p]||^2, X_1, Y_1 per replication.
  std::vector<double> sxx_, syy_, sxy_, sxxp_, syyp_, x0_, y0_;
};

// Monte Carlo estimate with its binomial standard error.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Empirical CDF value P(draw <= x).
McEstimate mc_cdf(const double* draws, std::size_t n, double x);

// Empirical quantile: the ceil(prob * n)-th smallest draw (1-based), the
// conservative upper order statistic.  prob in (0, 1].
double mc_quantile(std::vector<double> draws, double prob);

// Convenience wrappers that draw a fresh batch (deterministic in seed).
McEstimate mc_cdf(const SplitChiSqParams& params, bool crossfit, double x,
                  std::size_t n_reps, std::uint64_t seed, int threads = 1);
// Requires n_reps >= 1 / min(prob, 1 - prob) so the order statistic exists
// on both sides; prob in (0, 1).
double mc_quantile(const SplitChiSqParams& params, bool crossfit, double prob,
                   std::size_t n_reps, std::uint64_t seed, int threads = 1);

}  // namespace usplit
