#include "usplit/splitchisq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "usplit/qform.hpp"
#include "usplit/simd.hpp"
#include "usplit/special.hpp"

namespace usplit {

MomentSummary split_limit_moments(const SplitChiSqParams& params) {
  const auto p = make_params(params.d, params.p, params.m0, params.delta);
  const double d = static_cast<double>(p.d);
  const double pc = static_cast<double>(p.p);
  const double r = p.m0 / p.m1();
  MomentSummary out;
  out.mean = pc - d - d * r + p.m0 * p.delta;
  out.variance = 2.0 * (d - pc) + 4.0 * d * r + 2.0 * d * r * r +
                 4.0 * p.m0 * p.delta;
  return out;
}

MomentSummary crossfit_limit_moments(const SplitChiSqParams& params,
                                     double w0) {
  const auto p = make_params(params.d, params.p, params.m0, params.delta);
  if (!(w0 >= 0.0 && w0 <= 1.0)) {
    throw std::invalid_argument("crossfit: w0 must be in [0, 1]");
  }
  if (w0 != 0.5) {
    return qform::quadratic_form_cumulants(qform::crossfit_construction(p, w0))
        .moments();
  }
  const double d = static_cast<double>(p.d);
  const double pc = static_cast<double>(p.p);
  const double r = p.m0 / p.m1();
  const double ri = 1.0 / r;
  MomentSummary out;
  out.mean = pc - d - 0.5 * d * (r + ri) + 0.5 * p.delta;
  out.variance = (d - pc) * (1.0 + r + ri) + d * (2.0 + r + ri) +
                 0.5 * d * (r * r + ri * ri) + p.delta;
  return out;
}

double normal_approx_cdf(double x, const SplitChiSqParams& params) {
  const MomentSummary m = split_limit_moments(params);
  return special::norm_cdf((x - m.mean) / std::sqrt(m.variance));
}

namespace {

// Seven per-replication summaries of the underlying (X, Y) pair; every
// statistic below is affine in them, evaluated through the same fixed-order
// kernel so batched and single draws agree bit for bit.
struct SummaryColumns {
  const double *sxx, *syy, *sxy, *sxxp, *syyp, *x0, *y0;
  std::size_t n;
};

void combine_split_cols(const SummaryColumns& s, double m0, double delta,
                        double* out) {
  const double m1 = 1.0 - m0;
  const double c = std::sqrt(m0 / m1);
  const double w[7] = {1.0,     2.0 * std::sqrt(m0 * delta), -1.0, 2.0 * c,
                       -c * c,  0.0,                          0.0};
  const double* cols[7] = {s.sxxp, s.x0, s.sxx, s.sxy, s.syy, s.syyp, s.y0};
  simd::affine_combine7(s.n, m0 * delta, w, cols, out);
}

void combine_crossfit_cols(const SummaryColumns& s, double m0, double delta,
                           double w0, double* out) {
  const double m1 = 1.0 - m0;
  const double c2 = m0 / m1;
  const double c = std::sqrt(c2);
  const double w1 = 1.0 - w0;
  const double w[7] = {w0,
                       2.0 * w0 * std::sqrt(m0 * delta),
                       -(w0 + w1 / c2),
                       2.0 * (w0 * c + w1 / c),
                       -(w0 * c2 + w1),
                       w1,
                       2.0 * w1 * std::sqrt(m1 * delta)};
  const double* cols[7] = {s.sxxp, s.x0, s.sxx, s.sxy, s.syy, s.syyp, s.y0};
  simd::affine_combine7(s.n, w0 * m0 * delta + w1 * m1 * delta, w, cols, out);
}

struct SummaryRow {
  double sxx, syy, sxy, sxxp, syyp, x0, y0;

  SummaryColumns columns() const {
    return {&sxx, &syy, &sxy, &sxxp, &syyp, &x0, &y0, 1};
  }
};

SummaryRow summarize_pair(const double* x, const double* y, std::size_t d,
                          std::size_t p) {
  SummaryRow row;
  row.sxx = simd::sum_squares(x, d);
  row.syy = simd::sum_squares(y, d);
  row.sxy = simd::dot(x, y, d);
  row.sxxp = simd::sum_squares(x, p);
  row.syyp = simd::sum_squares(y, p);
  row.x0 = x[0];
  row.y0 = y[0];
  return row;
}

SummaryRow draw_pair_summaries(const SplitChiSqParams& params,
                               random::Xoshiro256pp& rng) {
  std::vector<double> x(params.d), y(params.d);
  random::fill_normals(rng, x.data(), params.d);
  random::fill_normals(rng, y.data(), params.d);
  return summarize_pair(x.data(), y.data(), params.d, params.p);
}

void check_w0(double w0) {
  if (!(w0 >= 0.0 && w0 <= 1.0)) {
    throw std::invalid_argument("crossfit: w0 must be in [0, 1]");
  }
}

}  // namespace

double sample_split_limit(const SplitChiSqParams& params,
                          random::Xoshiro256pp& rng) {
  const auto p = make_params(params.d, params.p, params.m0, params.delta);
  const SummaryRow row = draw_pair_summaries(p, rng);
  double out;
  combine_split_cols(row.columns(), p.m0, p.delta, &out);
  return out;
}

double sample_crossfit_limit(const SplitChiSqParams& params, double w0,
                             random::Xoshiro256pp& rng) {
  const auto p = make_params(params.d, params.p, params.m0, params.delta);
  check_w0(w0);
  const SummaryRow row = draw_pair_summaries(p, rng);
  double out;
  combine_crossfit_cols(row.columns(), p.m0, p.delta, w0, &out);
  return out;
}

double sample_split_limit_direction(std::size_t d, std::size_t p, double m0,
                                    const std::vector<double>& h,
                                    random::Xoshiro256pp& rng) {
  if (h.size() != p) {
    throw std::invalid_argument(
        "sample_split_limit_direction: h must have p entries");
  }
  const double delta = simd::sum_squares(h.data(), h.size());
  const auto params = make_params(d, p, m0, delta);
  std::vector<double> x(d), y(d);
  random::fill_normals(rng, x.data(), d);
  random::fill_normals(rng, y.data(), d);

  const double sm0 = std::sqrt(params.m0);
  std::vector<double> shifted(p);
  for (std::size_t i = 0; i < p; ++i) shifted[i] = x[i] + sm0 * h[i];
  const double t1 = simd::sum_squares(shifted.data(), p);

  const double c = std::sqrt(params.m0 / params.m1());
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - c * y[i];
  const double t2 = simd::sum_squares(diff.data(), d);
  return t1 - t2;
}

LimitBatch::LimitBatch(std::size_t d, std::size_t p, std::size_t n_reps,
                       std::uint64_t seed, std::uint64_t tag, int threads)
    : d_(d),
      p_(p),
      n_(n_reps),
      sxx_(n_reps),
      syy_(n_reps),
      sxy_(n_reps),
      sxxp_(n_reps),
      syyp_(n_reps),
      x0_(n_reps),
      y0_(n_reps) {
  (void)make_params(d, p, 0.5, 0.0);  // validates d, p
  if (n_reps == 0) throw std::invalid_argument("LimitBatch: n_reps == 0");

  const auto worker = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> x(d_), y(d_);
    for (std::size_t i = lo; i < hi; ++i) {
      auto rng = random::make_stream(seed, tag, i);
      random::fill_normals(rng, x.data(), d_);
      random::fill_normals(rng, y.data(), d_);
      const SummaryRow row = summarize_pair(x.data(), y.data(), d_, p_);
      sxx_[i] = row.sxx;
      syy_[i] = row.syy;
      sxy_[i] = row.sxy;
      sxxp_[i] = row.sxxp;
      syyp_[i] = row.syyp;
      x0_[i] = row.x0;
      y0_[i] = row.y0;
    }
  };

  const int n_threads = std::max(1, threads);
  if (n_threads == 1 || n_ < 2048) {
    worker(0, n_);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n_ + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const std::size_t lo = std::min(n_, static_cast<std::size_t>(t) * chunk);
    const std::size_t hi = std::min(n_, lo + chunk);
    if (lo < hi) pool.emplace_back(worker, lo, hi);
  }
  for (auto& th : pool) th.join();
}

void LimitBatch::combine_split(double m0, double delta, double* out) const {
  const SummaryColumns cols = {sxx_.data(), syy_.data(),  sxy_.data(),
                               sxxp_.data(), syyp_.data(), x0_.data(),
                               y0_.data(),  n_};
  combine_split_cols(cols, m0, delta, out);
}

void LimitBatch::combine_crossfit(double m0, double delta, double w0,
                                  double* out) const {
  const SummaryColumns cols = {sxx_.data(), syy_.data(),  sxy_.data(),
                               sxxp_.data(), syyp_.data(), x0_.data(),
                               y0_.data(),  n_};
  combine_crossfit_cols(cols, m0, delta, w0, out);
}

void LimitBatch::split_draws(double m0, double delta, double* out) const {
  const auto p = make_params(d_, p_, m0, delta);
  combine_split(p.m0, p.delta, out);
}

void LimitBatch::crossfit_draws(double m0, double delta, double w0,
                                double* out) const {
  const auto p = make_params(d_, p_, m0, delta);
  check_w0(w0);
  combine_crossfit(p.m0, p.delta, w0, out);
}

double LimitBatch::split_exceed_fraction(double m0, double delta,
                                         double thr) const {
  std::vector<double> draws(n_);
  split_draws(m0, delta, draws.data());
  const std::size_t k = simd::count_greater(draws.data(), n_, thr);
  return static_cast<double>(k) / static_cast<double>(n_);
}

double LimitBatch::crossfit_exceed_fraction(double m0, double delta, double w0,
                                            double thr) const {
  std::vector<double> draws(n_);
  crossfit_draws(m0, delta, w0, draws.data());
  const std::size_t k = simd::count_greater(draws.data(), n_, thr);
  return static_cast<double>(k) / static_cast<double>(n_);
}

McEstimate mc_cdf(const double* draws, std::size_t n, double x) {
  if (n == 0) throw std::invalid_argument("mc_cdf: empty sample");
  const std::size_t above = simd::count_greater(draws, n, x);
  const double est =
      static_cast<double>(n - above) / static_cast<double>(n);
  const double se = std::sqrt(est * (1.0 - est) / static_cast<double>(n));
  return {est, se};
}

double mc_quantile(std::vector<double> draws, double prob) {
  if (draws.empty()) throw std::invalid_argument("mc_quantile: empty sample");
  if (!(prob > 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("mc_quantile: prob must be in (0, 1]");
  }
  const auto n = draws.size();
  auto k = static_cast<std::size_t>(
      std::ceil(prob * static_cast<double>(n)));
  k = std::min(std::max<std::size_t>(k, 1), n);
  std::nth_element(draws.begin(), draws.begin() + (k - 1), draws.end());
  return draws[k - 1];
}

namespace {

std::vector<double> fresh_draws(const SplitChiSqParams& params, bool crossfit,
                                std::size_t n_reps, std::uint64_t seed,
                                int threads) {
  const auto p = make_params(params.d, params.p, params.m0, params.delta);
  const LimitBatch batch(p.d, p.p, n_reps, seed, random::stream_tag("mc"),
                         threads);
  std::vector<double> draws(n_reps);
  if (crossfit) {
    batch.crossfit_draws(p.m0, p.delta, 0.5, draws.data());
  } else {
    batch.split_draws(p.m0, p.delta, draws.data());
  }
  return draws;
}

}  // namespace

McEstimate mc_cdf(const SplitChiSqParams& params, bool crossfit, double x,
                  std::size_t n_reps, std::uint64_t seed, int threads) {
  const auto draws = fresh_draws(params, crossfit, n_reps, seed, threads);
  return mc_cdf(draws.data(), draws.size(), x);
}

double mc_quantile(const SplitChiSqParams& params, bool crossfit, double prob,
                   std::size_t n_reps, std::uint64_t seed, int threads) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::invalid_argument("mc_quantile: prob must be in (0, 1)");
  }
  const double tail = std::min(prob, 1.0 - prob);
  if (static_cast<double>(n_reps) * tail < 1.0) {
    throw std::invalid_argument(
        "mc_quantile: n_reps too small for the requested tail");
  }
  return mc_quantile(fresh_draws(params, crossfit, n_reps, seed, threads),
                     prob);
}

}  // namespace usplit
