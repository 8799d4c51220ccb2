#include "usplit/splitchisq.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "usplit/qform.hpp"
#include "usplit/rng.hpp"
#include "usplit/special.hpp"
#include "usplit/types.hpp"

using namespace usplit;
namespace rnd = usplit::random;

namespace {

struct SampleStats {
  double mean, variance, mean_se, var_se;
};

SampleStats summarize(const std::vector<double>& draws) {
  const double n = static_cast<double>(draws.size());
  double s1 = 0.0;
  for (double v : draws) s1 += v;
  const double mean = s1 / n;
  double s2 = 0.0, s4 = 0.0;
  for (double v : draws) {
    const double c = v - mean;
    s2 += c * c;
    s4 += c * c * c * c;
  }
  const double var = s2 / n;
  const double mean_se = std::sqrt(var / n);
  // s.e. of the sample variance from the fourth central moment.
  const double var_se = std::sqrt(std::max(0.0, s4 / n - var * var) / n);
  return {mean, var, mean_se, var_se};
}

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double dist = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    dist = std::max(dist, std::fabs(static_cast<double>(i) / na -
                                    static_cast<double>(j) / nb));
  }
  return dist;
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed-form moments

TEST(Moments, KnownValues) {
  // (d=2, p=2, m0=0.5, delta=0) -> mean -2, variance 12
  const auto m1 = split_limit_moments(make_params(2, 2, 0.5, 0.0));
  EXPECT_DOUBLE_EQ(m1.mean, -2.0);
  EXPECT_DOUBLE_EQ(m1.variance, 12.0);

  // (d=6, p=3, m0=0.5, delta=40) -> mean 11, variance 122
  const auto m2 = split_limit_moments(make_params(6, 3, 0.5, 40.0));
  EXPECT_DOUBLE_EQ(m2.mean, 11.0);
  EXPECT_DOUBLE_EQ(m2.variance, 122.0);

  // cross-fit (d=6, p=6, m0=0.5, delta=0) -> mean -6, variance 30
  const auto m3 = crossfit_limit_moments(make_params(6, 6, 0.5, 0.0));
  EXPECT_DOUBLE_EQ(m3.mean, -6.0);
  EXPECT_DOUBLE_EQ(m3.variance, 30.0);
}

TEST(Moments, ParamValidation) {
  EXPECT_THROW(make_params(0, 0, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(make_params(3, 4, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(make_params(3, 2, 0.5, -1.0), std::invalid_argument);
  EXPECT_THROW(make_params(3, 0, 0.5, 1.0), std::invalid_argument);
  // m0 clamps rather than throws.
  EXPECT_DOUBLE_EQ(make_params(3, 2, 0.001, 0.0).m0, 0.01);
  EXPECT_DOUBLE_EQ(make_params(3, 2, 0.9999, 0.0).m0, 0.99);
  EXPECT_THROW(crossfit_limit_moments(make_params(3, 2, 0.5, 0.0), 1.5),
               std::invalid_argument);
}

// Independent oracle: cumulants of the coupled quadratic form.
TEST(Moments, MatchQuadraticFormOracleOnRandomizedTuples) {
  auto rng = rnd::make_stream(99, rnd::stream_tag("oracle-grid"), 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform01() * 50.0);
    const std::size_t p =
        static_cast<std::size_t>(rng.uniform01() * static_cast<double>(d + 1));
    const double m0 = 0.05 + 0.9 * rng.uniform01();
    const double delta = (p == 0) ? 0.0 : 100.0 * rng.uniform01();
    const auto params = make_params(d, std::min(p, d), m0, delta);

    const auto split_cf = split_limit_moments(params);
    const auto split_or =
        qform::quadratic_form_cumulants(qform::split_construction(params))
            .moments();
    EXPECT_NEAR(split_cf.mean, split_or.mean,
                1e-10 * std::max(1.0, std::fabs(split_or.mean)))
        << "d=" << d << " p=" << p << " m0=" << m0 << " delta=" << delta;
    EXPECT_NEAR(split_cf.variance, split_or.variance,
                1e-10 * std::max(1.0, std::fabs(split_or.variance)))
        << "d=" << d << " p=" << p << " m0=" << m0 << " delta=" << delta;

    const auto cf_cf = crossfit_limit_moments(params);
    const auto cf_or =
        qform::quadratic_form_cumulants(qform::crossfit_construction(params))
            .moments();
    EXPECT_NEAR(cf_cf.mean, cf_or.mean,
                1e-10 * std::max(1.0, std::fabs(cf_or.mean)));
    EXPECT_NEAR(cf_cf.variance, cf_or.variance,
                1e-10 * std::max(1.0, std::fabs(cf_or.variance)));
  }
}

TEST(Moments, OracleCentralChiSquare) {
  // A = I, Sigma = I, mu = 0, scale = 1 in dimension m: central chi-square.
  const int m = 7;
  qform::QuadraticFormSpec spec;
  spec.a = Eigen::MatrixXd::Identity(m, m);
  spec.sigma = Eigen::MatrixXd::Identity(m, m);
  spec.mu = Eigen::VectorXd::Zero(m);
  spec.scale = 1.0;
  const auto c = qform::quadratic_form_cumulants(spec);
  EXPECT_DOUBLE_EQ(c.k1, 7.0);
  EXPECT_DOUBLE_EQ(c.k2, 14.0);   // 2m
  EXPECT_DOUBLE_EQ(c.k3, 56.0);   // 8m
  EXPECT_DOUBLE_EQ(c.k4, 336.0);  // 48m
  // Raw third moment via the stated cumulant conversion.
  EXPECT_DOUBLE_EQ(c.raw(3), c.k1 * c.k1 * c.k1 + 3.0 * c.k1 * c.k2 + c.k3);
}

TEST(Moments, OracleRejectsShapeMismatch) {
  qform::QuadraticFormSpec spec;
  spec.a = Eigen::MatrixXd::Identity(3, 3);
  spec.sigma = Eigen::MatrixXd::Identity(2, 2);
  spec.mu = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(qform::quadratic_form_cumulants(spec), std::invalid_argument);
}

// At m0=0.5 the cross-fit limit keeps the split mean but drops the variance
// by exactly p + delta.
TEST(Moments, CrossfitVarianceDominanceAtEvenSplit) {
  for (std::size_t d : {1u, 2u, 6u, 20u, 78u}) {
    for (std::size_t p : {0u, 1u, 3u}) {
      if (p > d) continue;
      for (double delta : {0.0, 4.0, 55.5}) {
        if (p == 0 && delta != 0.0) continue;
        const auto params = make_params(d, p, 0.5, delta);
        const auto sp = split_limit_moments(params);
        const auto cf = crossfit_limit_moments(params);
        EXPECT_DOUBLE_EQ(sp.mean, cf.mean);
        EXPECT_DOUBLE_EQ(sp.variance - cf.variance,
                         static_cast<double>(p) + delta);
      }
    }
  }
}

// Reweighted cross-fit: oracle mean must match the exact affine combination
// of the two directional split means (linearity of expectation), and the
// oracle variance must sit below the same affine combination of variances
// (the shared pair is positively coupled).
TEST(Moments, CrossfitWeightedMeanIsAffine) {
  for (double w0 : {0.0, 0.25, 0.4, 0.75, 1.0}) {
    const auto params = make_params(6, 3, 0.3, 12.0);
    const auto got = crossfit_limit_moments(params, w0);
    const auto fwd = split_limit_moments(params);
    const auto swapped =
        split_limit_moments(make_params(6, 3, params.m1(), 12.0));
    const double expected = w0 * fwd.mean + (1.0 - w0) * swapped.mean;
    EXPECT_NEAR(got.mean, expected, 1e-10 * std::max(1.0, std::fabs(expected)))
        << "w0=" << w0;
  }
}

// ---------------------------------------------------------------------------
// Samplers

TEST(Sampler, MeanVarianceMatchClosedFormsPlain) {
  const std::size_t n = 1000000;
  struct Case {
    std::size_t d, p;
    double m0, delta;
  };
  // Includes the documented examples (1,1,.5,0) mean -1 and (6,3,.5,40)
  // mean 11.
  const Case cases[] = {
      {1, 1, 0.5, 0.0}, {6, 3, 0.5, 40.0}, {6, 6, 0.3, 0.0}, {20, 5, 0.7, 9.0}};
  for (const auto& c : cases) {
    const auto params = make_params(c.d, c.p, c.m0, c.delta);
    const LimitBatch batch(c.d, c.p, n, 7, rnd::stream_tag("sampler-test"));
    std::vector<double> draws(n);
    batch.split_draws(c.m0, c.delta, draws.data());
    const auto stats = summarize(draws);
    const auto cf = split_limit_moments(params);
    EXPECT_NEAR(stats.mean, cf.mean, 4.0 * stats.mean_se)
        << "d=" << c.d << " p=" << c.p;
    EXPECT_NEAR(stats.variance, cf.variance, 4.0 * stats.var_se)
        << "d=" << c.d << " p=" << c.p;
  }
}

TEST(Sampler, MeanVarianceMatchClosedFormsCrossfit) {
  const std::size_t n = 1000000;
  const auto params = make_params(6, 6, 0.5, 0.0);
  const LimitBatch batch(6, 6, n, 11, rnd::stream_tag("sampler-test"));
  std::vector<double> draws(n);
  batch.crossfit_draws(0.5, 0.0, 0.5, draws.data());
  const auto stats = summarize(draws);
  EXPECT_NEAR(stats.mean, -6.0, 4.0 * stats.mean_se);
  EXPECT_NEAR(stats.variance, 30.0, 4.0 * stats.var_se);
}

TEST(Sampler, WeightedCrossfitMatchesOracleMoments) {
  const std::size_t n = 1000000;
  const double w0 = 0.25;
  const auto params = make_params(6, 3, 0.41, 10.0);
  const LimitBatch batch(6, 3, n, 13, rnd::stream_tag("sampler-test"));
  std::vector<double> draws(n);
  batch.crossfit_draws(params.m0, params.delta, w0, draws.data());
  const auto stats = summarize(draws);
  const auto oracle = crossfit_limit_moments(params, w0);
  EXPECT_NEAR(stats.mean, oracle.mean, 4.0 * stats.mean_se);
  EXPECT_NEAR(stats.variance, oracle.variance, 4.0 * stats.var_se);
}

// At m0 = 0.5 the cross-fit draw has the same expectation as the plain draw.
TEST(Sampler, CrossfitKeepsMeanAtEvenSplit) {
  const std::size_t n = 500000;
  const LimitBatch batch(6, 2, n, 17, rnd::stream_tag("sampler-test"));
  std::vector<double> plain(n), cf(n);
  batch.split_draws(0.5, 5.0, plain.data());
  batch.crossfit_draws(0.5, 5.0, 0.5, cf.data());
  const auto sp = summarize(plain);
  const auto sc = summarize(cf);
  const double se = std::sqrt(sp.mean_se * sp.mean_se +
                              sc.mean_se * sc.mean_se);
  EXPECT_NEAR(sp.mean, sc.mean, 3.0 * se);
  EXPECT_LT(sc.variance, sp.variance);  // dominance, here with huge margin
}

// Single-draw sampler and batch generator are the same construction: with the
// same substream they must agree bit for bit.
TEST(Sampler, SingleDrawMatchesBatchBitExactly) {
  const std::size_t n = 64;
  const std::uint64_t seed = 123;
  const std::uint64_t tag = rnd::stream_tag("bit-exact");
  const auto params = make_params(7, 2, 0.37, 3.5);

  const LimitBatch batch(7, 2, n, seed, tag);
  std::vector<double> from_batch(n), from_batch_cf(n);
  batch.split_draws(params.m0, params.delta, from_batch.data());
  batch.crossfit_draws(params.m0, params.delta, 0.3, from_batch_cf.data());

  for (std::size_t i = 0; i < n; ++i) {
    auto rng = rnd::make_stream(seed, tag, i);
    EXPECT_EQ(sample_split_limit(params, rng), from_batch[i]) << i;
    auto rng2 = rnd::make_stream(seed, tag, i);
    EXPECT_EQ(sample_crossfit_limit(params, 0.3, rng2), from_batch_cf[i]) << i;
  }
}

// The law depends on the direction h only through its norm.
TEST(Sampler, RotationInvarianceByKsDistance) {
  const std::size_t n = 100000;
  const std::size_t d = 6, p = 3;
  const double m0 = 0.4, delta = 9.0;

  // Axis-aligned h = (3, 0, 0) versus a rotated direction of equal norm.
  const std::vector<double> h_axis = {3.0, 0.0, 0.0};
  const double r = 3.0 / std::sqrt(3.0);
  const std::vector<double> h_rot = {r, r, r};

  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto ra = rnd::make_stream(31, rnd::stream_tag("rot-a"), i);
    a[i] = sample_split_limit_direction(d, p, m0, h_axis, ra);
    auto rb = rnd::make_stream(32, rnd::stream_tag("rot-b"), i);
    b[i] = sample_split_limit_direction(d, p, m0, h_rot, rb);
  }
  const double crit = special::ks_two_sample_critical(0.01, n, n);
  EXPECT_LT(ks_distance(a, b), crit);

  // And the axis-aligned direction agrees with the delta parameterization.
  std::vector<double> c(n);
  const LimitBatch batch(d, p, n, 33, rnd::stream_tag("rot-c"));
  batch.split_draws(m0, delta, c.data());
  EXPECT_LT(ks_distance(a, c), crit);
}

// ---------------------------------------------------------------------------
// Monte Carlo CDF / quantiles

TEST(McSummaries, CdfOnDegenerateSample) {
  const std::vector<double> constant(100, 2.5);
  const auto at = mc_cdf(constant.data(), constant.size(), 2.5);
  EXPECT_DOUBLE_EQ(at.estimate, 1.0);
  EXPECT_DOUBLE_EQ(at.std_error, 0.0);
  const auto below = mc_cdf(constant.data(), constant.size(), 2.4999);
  EXPECT_DOUBLE_EQ(below.estimate, 0.0);
  EXPECT_DOUBLE_EQ(mc_quantile(constant, 0.2), 2.5);
  EXPECT_DOUBLE_EQ(mc_quantile(constant, 0.99), 2.5);
}

TEST(McSummaries, QuantileIsUpperOrderStatistic) {
  // 10 values 1..10: prob 0.95 -> ceil(9.5) = 10th; prob 0.91 -> 10th;
  // prob 0.90 -> 9th; prob 0.05 -> 1st.
  std::vector<double> v = {10, 3, 7, 1, 9, 2, 8, 5, 4, 6};
  EXPECT_DOUBLE_EQ(mc_quantile(v, 0.95), 10.0);
  EXPECT_DOUBLE_EQ(mc_quantile(v, 0.91), 10.0);
  EXPECT_DOUBLE_EQ(mc_quantile(v, 0.90), 9.0);
  EXPECT_DOUBLE_EQ(mc_quantile(v, 0.05), 1.0);
  EXPECT_DOUBLE_EQ(mc_quantile(v, 1.0), 10.0);
  EXPECT_THROW(mc_quantile(v, 0.0), std::invalid_argument);
  EXPECT_THROW(mc_quantile(std::vector<double>{}, 0.5),
               std::invalid_argument);
}

// Validity in the limit: P(draw <= -2 ln alpha) >= 1 - alpha.
TEST(McSummaries, LevelBoundAtUniversalThreshold) {
  const std::size_t n = 100000;
  for (std::size_t d : {1u, 6u, 20u}) {
    for (std::size_t p : {std::size_t{1}, d}) {
      const LimitBatch batch(d, p, n, 41, rnd::stream_tag("level"));
      std::vector<double> draws(n);
      for (double m0 : {0.2, 0.5, 0.8}) {
        batch.split_draws(m0, 0.0, draws.data());
        for (double alpha : {0.01, 0.05, 0.1}) {
          const auto est =
              mc_cdf(draws.data(), n, universal_threshold(alpha));
          EXPECT_GE(est.estimate, 1.0 - alpha - 3.0 * est.std_error)
              << "d=" << d << " p=" << p << " m0=" << m0
              << " alpha=" << alpha;
        }
      }
    }
  }
}

// Null 95% quantiles stay below the universal threshold across the grid the
// validity margin comes from.
TEST(McSummaries, NullQuantilesBelowUniversalThreshold) {
  const std::size_t n = 100000;
  const double thr = universal_threshold(0.05);
  for (std::size_t p = 1; p <= 6; ++p) {
    const LimitBatch batch(6, p, n, 43, rnd::stream_tag("quantile"));
    std::vector<double> draws(n);
    for (double m0 : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
      batch.split_draws(m0, 0.0, draws.data());
      EXPECT_LT(mc_quantile(draws, 0.95), thr) << "p=" << p << " m0=" << m0;
    }
  }
}

TEST(McSummaries, ParamsWrappersAreDeterministic) {
  const auto params = make_params(60, 10, 0.2, 0.0);
  const double q1 = mc_quantile(params, false, 0.95, 100000, 5);
  const double q2 = mc_quantile(params, false, 0.95, 100000, 5);
  EXPECT_EQ(q1, q2);
  EXPECT_TRUE(std::isfinite(q1));

  const auto c1 = mc_cdf(params, false, universal_threshold(0.05), 50000, 6);
  const auto c2 = mc_cdf(params, false, universal_threshold(0.05), 50000, 6);
  EXPECT_EQ(c1.estimate, c2.estimate);
  EXPECT_GE(c1.estimate, 0.95 - 3.0 * c1.std_error);

  EXPECT_THROW(mc_quantile(params, false, 0.95, 10, 5),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Normal approximation

TEST(NormalApprox, MomentMatchedValues) {
  const auto params = make_params(6, 3, 0.5, 40.0);
  // x at the mean -> 1/2.
  EXPECT_DOUBLE_EQ(normal_approx_cdf(11.0, params), 0.5);
  // Frozen reference: Phi((-2 ln 0.05 - 11)/sqrt(122)).
  EXPECT_NEAR(normal_approx_cdf(universal_threshold(0.05), params),
              0.32511183202704518, 1e-12);
  EXPECT_DOUBLE_EQ(normal_approx_cdf(1e300, params), 1.0);
  EXPECT_DOUBLE_EQ(normal_approx_cdf(-1e300, params), 0.0);
}

// Threading the batch construction must not change the replication streams.
TEST(Batch, ThreadCountDoesNotChangeDraws) {
  const std::size_t n = 4096;
  const LimitBatch one(13, 4, n, 77, rnd::stream_tag("threads"), 1);
  const LimitBatch four(13, 4, n, 77, rnd::stream_tag("threads"), 4);
  std::vector<double> a(n), b(n);
  one.split_draws(0.35, 2.0, a.data());
  four.split_draws(0.35, 2.0, b.data());
  EXPECT_EQ(a, b);
}
