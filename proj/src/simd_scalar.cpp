#include "usplit/simd.hpp"

namespace usplit::simd::detail {

double sum_squares_scalar(const double* x, std::size_t n) noexcept {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i + 0] * x[i + 0];
    a1 += x[i + 1] * x[i + 1];
    a2 += x[i + 2] * x[i + 2];
    a3 += x[i + 3] * x[i + 3];
  }
  double s = (a0 + a1) + (a2 + a3);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) noexcept {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i + 0] * y[i + 0];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
  }
  double s = (a0 + a1) + (a2 + a3);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void add_columns_scalar(const double* rows, std::size_t n, std::size_t d,
                        double* acc) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows + i * d;
    for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
  }
}

void affine_combine7_scalar(std::size_t n, double c0, const double w[7],
                            const double* const a[7], double* out) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    double t = c0;
    t += w[0] * a[0][i];
    t += w[1] * a[1][i];
    t += w[2] * a[2][i];
    t += w[3] * a[3][i];
    t += w[4] * a[4][i];
    t += w[5] * a[5][i];
    t += w[6] * a[6][i];
    out[i] = t;
  }
}

std::size_t count_greater_scalar(const double* x, std::size_t n,
                                 double thr) noexcept {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (x[i] > thr) ? 1u : 0u;
  return c;
}

}  // namespace usplit::simd::detail
