#include "usplit/simd.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "usplit/rng.hpp"

namespace simd = usplit::simd;
using usplit::random::make_stream;
using usplit::random::stream_tag;

namespace {

// Restores the previously active kernel level when leaving scope, so a test
// that forces a level cannot leak it into later tests.
struct LevelGuard {
  simd::Level saved = simd::active_level();
  ~LevelGuard() { simd::force_level(saved); }
};

std::vector<double> random_vector(std::size_t n, std::uint64_t index) {
  auto rng = make_stream(2024, stream_tag("kernel-test"), index);
  std::vector<double> v(n);
  for (auto& x : v) x = 4.0 * rng.uniform01() - 2.0;
  return v;
}

const std::vector<std::size_t>& test_sizes() {
  static const std::vector<std::size_t> sizes = [] {
    std::vector<std::size_t> s;
    for (std::size_t n = 0; n <= 70; ++n) s.push_back(n);
    s.push_back(255);
    s.push_back(256);
    s.push_back(1001);
    return s;
  }();
  return sizes;
}

bool have_avx2() {
  LevelGuard guard;
  return simd::force_level(simd::Level::avx2);
}

}  // namespace

TEST(Kernels, LevelNamesAndForcing) {
  LevelGuard guard;
  EXPECT_STREQ(simd::level_name(simd::Level::scalar), "scalar");
  EXPECT_STREQ(simd::level_name(simd::Level::avx2), "avx2");
  ASSERT_TRUE(simd::force_level(simd::Level::scalar));
  EXPECT_EQ(simd::active_level(), simd::Level::scalar);
}

TEST(Kernels, SumSquaresMatchesWideAccumulation) {
  LevelGuard guard;
  ASSERT_TRUE(simd::force_level(simd::Level::scalar));
  for (std::size_t n : test_sizes()) {
    const auto x = random_vector(n, n);
    long double ref = 0.0L;
    for (double v : x) ref += static_cast<long double>(v) * v;
    const double got = simd::sum_squares(x.data(), n);
    EXPECT_NEAR(got, static_cast<double>(ref),
                1e-12 * (1.0 + std::fabs(static_cast<double>(ref))))
        << "n=" << n;
  }
}

TEST(Kernels, DotMatchesWideAccumulation) {
  LevelGuard guard;
  ASSERT_TRUE(simd::force_level(simd::Level::scalar));
  for (std::size_t n : test_sizes()) {
    const auto x = random_vector(n, 1000 + n);
    const auto y = random_vector(n, 2000 + n);
    long double ref = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      ref += static_cast<long double>(x[i]) * y[i];
    }
    const double got = simd::dot(x.data(), y.data(), n);
    EXPECT_NEAR(got, static_cast<double>(ref),
                1e-12 * (1.0 + std::fabs(static_cast<double>(ref))))
        << "n=" << n;
  }
}

TEST(Kernels, AddColumnsMatchesNaive) {
  LevelGuard guard;
  ASSERT_TRUE(simd::force_level(simd::Level::scalar));
  for (std::size_t d : {1u, 2u, 3u, 4u, 7u, 8u, 12u, 30u}) {
    for (std::size_t n : {0u, 1u, 5u, 64u}) {
      const auto rows = random_vector(n * d, 7000 + 100 * d + n);
      std::vector<double> acc(d, 0.5);
      std::vector<double> ref = acc;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) ref[j] += rows[i * d + j];
      }
      simd::add_columns(rows.data(), n, d, acc.data());
      for (std::size_t j = 0; j < d; ++j) {
        EXPECT_NEAR(acc[j], ref[j], 1e-12 * (1.0 + std::fabs(ref[j])))
            << "d=" << d << " n=" << n << " j=" << j;
      }
    }
  }
}

TEST(Kernels, AffineCombine7MatchesSpecifiedOrder) {
  LevelGuard guard;
  ASSERT_TRUE(simd::force_level(simd::Level::scalar));
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 129u}) {
    std::vector<std::vector<double>> cols;
    const double* ptrs[7];
    for (int j = 0; j < 7; ++j) {
      cols.push_back(random_vector(n, 9000 + 10 * n + j));
      ptrs[j] = cols.back().data();
    }
    const double w[7] = {0.3, -1.2, 2.0, 0.0, -0.75, 1.5, 0.125};
    const double c0 = 0.875;
    std::vector<double> out(n, -1.0);
    simd::affine_combine7(n, c0, w, ptrs, out.data());
    for (std::size_t i = 0; i < n; ++i) {
      double ref = c0;
      for (int j = 0; j < 7; ++j) ref += w[j] * ptrs[j][i];
      // Same association order as the kernel, so equality is exact.
      EXPECT_EQ(out[i], ref) << "n=" << n << " i=" << i;
    }
  }
}

TEST(Kernels, CountGreaterMatchesStd) {
  LevelGuard guard;
  ASSERT_TRUE(simd::force_level(simd::Level::scalar));
  for (std::size_t n : test_sizes()) {
    const auto x = random_vector(n, 5000 + n);
    for (double thr : {-3.0, -0.5, 0.0, 0.5, 1.999, 2.5}) {
      const auto ref = static_cast<std::size_t>(
          std::count_if(x.begin(), x.end(), [&](double v) { return v > thr; }));
      EXPECT_EQ(simd::count_greater(x.data(), n, thr), ref)
          << "n=" << n << " thr=" << thr;
    }
  }
}

// The SIMD variants must produce bit-identical results to the scalar
// reference for every input; Monte Carlo results must not depend on which
// one the dispatcher picks.
TEST(Kernels, Avx2BitIdenticalToScalar) {
  if (!have_avx2()) GTEST_SKIP() << "AVX2 unavailable on this host or build";
  LevelGuard guard;
  for (std::size_t n : test_sizes()) {
    const auto x = random_vector(n, 100000 + n);
    const auto y = random_vector(n, 200000 + n);

    ASSERT_TRUE(simd::force_level(simd::Level::scalar));
    const double ss_s = simd::sum_squares(x.data(), n);
    const double dot_s = simd::dot(x.data(), y.data(), n);
    const std::size_t cg_s = simd::count_greater(x.data(), n, 0.25);

    ASSERT_TRUE(simd::force_level(simd::Level::avx2));
    const double ss_v = simd::sum_squares(x.data(), n);
    const double dot_v = simd::dot(x.data(), y.data(), n);
    const std::size_t cg_v = simd::count_greater(x.data(), n, 0.25);

    EXPECT_EQ(ss_s, ss_v) << "sum_squares n=" << n;
    EXPECT_EQ(dot_s, dot_v) << "dot n=" << n;
    EXPECT_EQ(cg_s, cg_v) << "count_greater n=" << n;
  }
}

TEST(Kernels, Avx2BitIdenticalToScalarColumnKernels) {
  if (!have_avx2()) GTEST_SKIP() << "AVX2 unavailable on this host or build";
  LevelGuard guard;
  for (std::size_t d : {1u, 3u, 4u, 8u, 13u, 78u}) {
    const std::size_t n = 33;
    const auto rows = random_vector(n * d, 300000 + d);
    std::vector<double> acc_s(d, 0.25), acc_v(d, 0.25);

    ASSERT_TRUE(simd::force_level(simd::Level::scalar));
    simd::add_columns(rows.data(), n, d, acc_s.data());
    ASSERT_TRUE(simd::force_level(simd::Level::avx2));
    simd::add_columns(rows.data(), n, d, acc_v.data());
    for (std::size_t j = 0; j < d; ++j) {
      EXPECT_EQ(acc_s[j], acc_v[j]) << "d=" << d << " j=" << j;
    }
  }

  for (std::size_t n : {0u, 1u, 4u, 7u, 32u, 65u, 1001u}) {
    std::vector<std::vector<double>> cols;
    const double* ptrs[7];
    for (int j = 0; j < 7; ++j) {
      cols.push_back(random_vector(n, 400000 + 10 * n + j));
      ptrs[j] = cols.back().data();
    }
    const double w[7] = {1.0, -0.5, 0.25, 2.0, -1.0, 0.75, -0.125};
    std::vector<double> out_s(n), out_v(n);

    ASSERT_TRUE(simd::force_level(simd::Level::scalar));
    simd::affine_combine7(n, 1.5, w, ptrs, out_s.data());
    ASSERT_TRUE(simd::force_level(simd::Level::avx2));
    simd::affine_combine7(n, 1.5, w, ptrs, out_v.data());
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(out_s[i], out_v[i]) << "n=" << n << " i=" << i;
    }
  }
}
