#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "usplit/data.hpp"
#include "usplit/rng.hpp"
#include "usplit/special.hpp"
#include "usplit/types.hpp"

namespace usplit {

// Model dimensions: d free parameters in the full model, k in the null
// model, so the hypothesis constrains p = d - k directions.
struct ModelDims {
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t p() const noexcept { return d - k; }
};

// A statistical model usable with the split tests.  Theta is the model's
// parameter type; log-likelihoods are totals over all rows of the dataset.
template <class M>
concept SplitModel = requires(const M& model, const typename M::Theta& theta,
                              const Dataset& data, std::size_t n,
                              random::Xoshiro256pp& rng) {
  { model.log_likelihood(theta, data) } -> std::convertible_to<double>;
  { model.mle_full(data) } -> std::convertible_to<typename M::Theta>;
  { model.mle_null(data) } -> std::convertible_to<typename M::Theta>;
  { model.simulate(theta, n, rng) } -> std::convertible_to<Dataset>;
  { model.dims() } -> std::convertible_to<ModelDims>;
};

enum class TestVariant { plain, crossfit, subsample, classical };

inline const char* variant_name(TestVariant v) noexcept {
  switch (v) {
    case TestVariant::plain: return "plain";
    case TestVariant::crossfit: return "crossfit";
    case TestVariant::subsample: return "subsample";
    case TestVariant::classical: return "classical";
  }
  return "?";
}

struct SlrtResult {
  double lambda = 0.0;  // the statistic the decision is based on
  std::optional<double> lambda_swap;  // role-swapped statistic (cross-fit)
  double weight_w0 = 1.0;
  double threshold = 0.0;
  bool reject = false;
  TestVariant variant = TestVariant::plain;
  std::size_t n_subsamples = 1;
};

// Split statistic: twice the log-ratio, on the evaluation part, of the
// likelihood at the full-model estimate from the estimation part to the
// likelihood at the null estimate from the evaluation part itself.
template <SplitModel M>
double slrt_statistic(const M& model, const Dataset& data,
                      const DataSplit& split) {
  const Dataset d0 = take_rows(data, split.part0);
  const Dataset d1 = take_rows(data, split.part1);
  const auto theta_full = model.mle_full(d1);
  const auto theta_null = model.mle_null(d0);
  return 2.0 * (model.log_likelihood(theta_full, d0) -
                model.log_likelihood(theta_null, d0));
}

template <SplitModel M>
SlrtResult slrt_test(const M& model, const Dataset& data,
                     const DataSplit& split, double alpha) {
  SlrtResult res;
  res.variant = TestVariant::plain;
  res.lambda = slrt_statistic(model, data, split);
  res.threshold = universal_threshold(alpha);
  res.reject = res.lambda > res.threshold;
  return res;
}

// Cross-fit statistic: the w0-weighted combination of the split statistic
// and its role-swapped counterpart.  Averaging the corresponding e-values
// would also be valid; the weighted statistic is what the limit theory
// describes, and w0 = 1 reduces it exactly to the plain statistic.
template <SplitModel M>
SlrtResult crossfit_statistic(const M& model, const Dataset& data,
                              const DataSplit& split, double w0,
                              double alpha) {
  if (!(w0 >= 0.0 && w0 <= 1.0)) {
    throw std::invalid_argument("crossfit_statistic: w0 must lie in [0, 1]");
  }
  const Dataset d0 = take_rows(data, split.part0);
  const Dataset d1 = take_rows(data, split.part1);
  const auto full_from_d1 = model.mle_full(d1);
  const auto full_from_d0 = model.mle_full(d0);
  const auto null_on_d0 = model.mle_null(d0);
  const auto null_on_d1 = model.mle_null(d1);
  const double forward = 2.0 * (model.log_likelihood(full_from_d1, d0) -
                                model.log_likelihood(null_on_d0, d0));
  const double swapped = 2.0 * (model.log_likelihood(full_from_d0, d1) -
                                model.log_likelihood(null_on_d1, d1));
  SlrtResult res;
  res.variant = TestVariant::crossfit;
  res.weight_w0 = w0;
  res.lambda_swap = swapped;
  res.lambda = w0 * forward + (1.0 - w0) * swapped;
  res.threshold = universal_threshold(alpha);
  res.reject = res.lambda > res.threshold;
  return res;
}

// Subsampled test: average the e-values exp(lambda_j / 2) over n_subsamples
// independent splits and reject when the average exceeds 1 / alpha.  On the
// statistic scale the combined value is 2 (logsumexp_j(lambda_j / 2) - ln J),
// compared against the usual threshold -2 ln alpha.  With n_subsamples = 1
// the split, statistic, and decision coincide with the plain test for the
// same seed.
template <SplitModel M>
SlrtResult subsample_statistic(const M& model, const Dataset& data, double m0,
                               std::size_t n_subsamples, double alpha,
                               std::uint64_t seed) {
  if (n_subsamples == 0) {
    throw std::invalid_argument(
        "subsample_statistic: need at least one subsample");
  }
  std::vector<double> half_lambdas(n_subsamples);
  for (std::size_t j = 0; j < n_subsamples; ++j) {
    const DataSplit split = split_data(data.n_rows, m0, seed, j);
    half_lambdas[j] = 0.5 * slrt_statistic(model, data, split);
  }
  const double top =
      *std::max_element(half_lambdas.begin(), half_lambdas.end());
  double sum_exp = 0.0;
  for (const double h : half_lambdas) sum_exp += std::exp(h - top);
  const double log_mean_e =
      top + std::log(sum_exp) - std::log(static_cast<double>(n_subsamples));

  SlrtResult res;
  res.variant = TestVariant::subsample;
  res.n_subsamples = n_subsamples;
  res.lambda = 2.0 * log_mean_e;
  res.threshold = universal_threshold(alpha);
  res.reject = res.lambda > res.threshold;
  return res;
}

// Classical likelihood-ratio test on the full dataset, calibrated by the
// chi-square limit with p degrees of freedom.  Baseline for regular models.
template <SplitModel M>
SlrtResult classical_lrt(const M& model, const Dataset& data, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("classical_lrt: alpha must lie in (0, 1)");
  }
  const auto theta_full = model.mle_full(data);
  const auto theta_null = model.mle_null(data);
  SlrtResult res;
  res.variant = TestVariant::classical;
  res.lambda = 2.0 * (model.log_likelihood(theta_full, data) -
                      model.log_likelihood(theta_null, data));
  res.threshold = special::chi2_quantile(
      1.0 - alpha, static_cast<double>(model.dims().p()));
  res.reject = res.lambda > res.threshold;
  return res;
}

}  // namespace usplit
