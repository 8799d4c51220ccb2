#pragma once

#include <cstddef>

// Vectorized reduction kernels with a scalar reference implementation and a
// runtime-selected AVX2 variant.  All variants are bit-identical by
// construction: both use four independent stride-4 accumulators combined as
// (a0+a1)+(a2+a3), a sequential scalar tail, and no fused multiply-add.
namespace usplit::simd {

enum class Level : int { scalar = 0, avx2 = 1 };

// Kernel level currently in use (auto-detected at startup; the environment
// variable USPLIT_SIMD=scalar|avx2 overrides detection).
Level active_level() noexcept;
const char* level_name(Level level) noexcept;

// Force a specific level (for equivalence tests).  Returns false if the host
// cannot run it; the level is unchanged in that case.
bool force_level(Level level) noexcept;

// sum of x[i]^2
double sum_squares(const double* x, std::size_t n) noexcept;

// sum of x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n) noexcept;

// acc[j] += sum over rows i of rows[i*d + j], for j in [0, d)
void add_columns(const double* rows, std::size_t n, std::size_t d,
                 double* acc) noexcept;

// out[i] = ((((((c0 + w[0]*a[0][i]) + w[1]*a[1][i]) + ... ) + w[6]*a[6][i]
// evaluated in that fixed association order.
void affine_combine7(std::size_t n, double c0, const double w[7],
                     const double* const a[7], double* out) noexcept;

// number of i with x[i] > thr
std::size_t count_greater(const double* x, std::size_t n,
                          double thr) noexcept;

namespace detail {
double sum_squares_scalar(const double* x, std::size_t n) noexcept;
double dot_scalar(const double* x, const double* y, std::size_t n) noexcept;
void add_columns_scalar(const double* rows, std::size_t n, std::size_t d,
                        double* acc) noexcept;
void affine_combine7_scalar(std::size_t n, double c0, const double w[7],
                            const double* const a[7], double* out) noexcept;
std::size_t count_greater_scalar(const double* x, std::size_t n,
                                 double thr) noexcept;

#if defined(USPLIT_HAVE_AVX2_TU)
double sum_squares_avx2(const double* x, std::size_t n) noexcept;
double dot_avx2(const double* x, const double* y, std::size_t n) noexcept;
void add_columns_avx2(const double* rows, std::size_t n, std::size_t d,
                      double* acc) noexcept;
void affine_combine7_avx2(std::size_t n, double c0, const double w[7],
                          const double* const a[7], double* out) noexcept;
std::size_t count_greater_avx2(const double* x, std::size_t n,
                               double thr) noexcept;
#endif
}  // namespace detail

}  // namespace usplit::simd
