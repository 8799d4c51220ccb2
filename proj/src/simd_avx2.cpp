#include "usplit/simd.hpp"

#if defined(USPLIT_HAVE_AVX2_TU)

#include <immintrin.h>

namespace usplit::simd::detail {

namespace {

// (l0+l1)+(l2+l3), matching the scalar accumulator combine.
inline double horizontal_sum(__m256d v) noexcept {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

double sum_squares_avx2(const double* x, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = horizontal_sum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
  }
  double s = horizontal_sum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void add_columns_avx2(const double* rows, std::size_t n, std::size_t d,
                      double* acc) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows + i * d;
    std::size_t j = 0;
    for (; j + 4 <= d; j += 4) {
      __m256d a = _mm256_loadu_pd(acc + j);
      __m256d r = _mm256_loadu_pd(row + j);
      _mm256_storeu_pd(acc + j, _mm256_add_pd(a, r));
    }
    for (; j < d; ++j) acc[j] += row[j];
  }
}

void affine_combine7_avx2(std::size_t n, double c0, const double w[7],
                          const double* const a[7], double* out) noexcept {
  const __m256d vc0 = _mm256_set1_pd(c0);
  __m256d vw[7];
  for (int k = 0; k < 7; ++k) vw[k] = _mm256_set1_pd(w[k]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = vc0;
    for (int k = 0; k < 7; ++k) {
      __m256d v = _mm256_loadu_pd(a[k] + i);
      t = _mm256_add_pd(t, _mm256_mul_pd(vw[k], v));
    }
    _mm256_storeu_pd(out + i, t);
  }
  for (; i < n; ++i) {
    double t = c0;
    for (int k = 0; k < 7; ++k) t += w[k] * a[k][i];
    out[i] = t;
  }
}

std::size_t count_greater_avx2(const double* x, std::size_t n,
                               double thr) noexcept {
  const __m256d vthr = _mm256_set1_pd(thr);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d m = _mm256_cmp_pd(v, vthr, _CMP_GT_OQ);
    c += static_cast<std::size_t>(__builtin_popcount(
        static_cast<unsigned>(_mm256_movemask_pd(m))));
  }
  for (; i < n; ++i) c += (x[i] > thr) ? 1u : 0u;
  return c;
}

}  // namespace usplit::simd::detail

#endif  // USPLIT_HAVE_AVX2_TU
