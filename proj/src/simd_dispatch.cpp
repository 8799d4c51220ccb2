#include "usplit/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace usplit::simd {

namespace {

bool host_supports_avx2() noexcept {
#if defined(USPLIT_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Level detect_level() noexcept {
  Level level = host_supports_avx2() ? Level::avx2 : Level::scalar;
  if (const char* env = std::getenv("USPLIT_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) level = Level::scalar;
    if (std::strcmp(env, "avx2") == 0 && host_supports_avx2())
      level = Level::avx2;
  }
  return level;
}

std::atomic<Level>& current_level() noexcept {
  static std::atomic<Level> level{detect_level()};
  return level;
}

}  // namespace

Level active_level() noexcept { return current_level().load(); }

const char* level_name(Level level) noexcept {
  return level == Level::avx2 ? "avx2" : "scalar";
}

bool force_level(Level level) noexcept {
  if (level == Level::avx2 && !host_supports_avx2()) return false;
  current_level().store(level);
  return true;
}

double sum_squares(const double* x, std::size_t n) noexcept {
#if defined(USPLIT_HAVE_AVX2_TU)
  if (active_level() == Level::avx2) return detail::sum_squares_avx2(x, n);
#endif
  return detail::sum_squares_scalar(x, n);
}

double dot(const double* x, const double* y, std::size_t n) noexcept {
#if defined(USPLIT_HAVE_AVX2_TU)
  if (active_level() == Level::avx2) return detail::dot_avx2(x, y, n);
#endif
  return detail::dot_scalar(x, y, n);
}

void add_columns(const double* rows, std::size_t n, std::size_t d,
                 double* acc) noexcept {
#if defined(USPLIT_HAVE_AVX2_TU)
  if (active_level() == Level::avx2)
    return detail::add_columns_avx2(rows, n, d, acc);
#endif
  return detail::add_columns_scalar(rows, n, d, acc);
}

void affine_combine7(std::size_t n, double c0, const double w[7],
                     const double* const a[7], double* out) noexcept {
#if defined(USPLIT_HAVE_AVX2_TU)
  if (active_level() == Level::avx2)
    return detail::affine_combine7_avx2(n, c0, w, a, out);
#endif
  return detail::affine_combine7_scalar(n, c0, w, a, out);
}

std::size_t count_greater(const double* x, std::size_t n,
                          double thr) noexcept {
#if defined(USPLIT_HAVE_AVX2_TU)
  if (active_level() == Level::avx2)
    return detail::count_greater_avx2(x, n, thr);
#endif
  return detail::count_greater_scalar(x, n, thr);
}

}  // namespace usplit::simd
