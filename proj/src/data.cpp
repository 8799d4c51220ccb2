#include "usplit/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "usplit/rng.hpp"

namespace usplit {

namespace {

// Uniform integer in [0, bound) via the fixed-point multiply reduction.
std::size_t uniform_below(random::Xoshiro256pp& rng,
                          std::size_t bound) noexcept {
  const std::uint64_t x = rng();
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(x) * bound) >> 64);
}

}  // namespace

DataSplit split_data(std::size_t n, double m0, std::uint64_t seed,
                     std::uint64_t index) {
  if (n == 0) throw std::invalid_argument("split_data: empty dataset");
  if (!(m0 > 0.0 && m0 < 1.0)) {
    throw std::invalid_argument("split_data: m0 must lie in (0, 1)");
  }
  const auto n0 = static_cast<std::size_t>(
      std::floor(m0 * static_cast<double>(n)));
  if (n0 == 0 || n0 == n) {
    throw std::invalid_argument("split_data: split leaves an empty part");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = random::make_stream(seed, random::stream_tag("split"), index);
  // Partial Fisher-Yates: only the first n0 positions need to be drawn.
  for (std::size_t i = 0; i < n0; ++i) {
    const std::size_t j = i + uniform_below(rng, n - i);
    std::swap(order[i], order[j]);
  }

  DataSplit split;
  split.m0 = m0;
  split.seed = seed;
  split.part0.assign(order.begin(), order.begin() + n0);
  split.part1.assign(order.begin() + n0, order.end());
  std::sort(split.part0.begin(), split.part0.end());
  std::sort(split.part1.begin(), split.part1.end());
  return split;
}

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out(rows.size(), data.n_cols);
  double* dst = out.values.data();
  for (const std::size_t r : rows) {
    const double* src = data.row(r);
    std::copy(src, src + data.n_cols, dst);
    dst += data.n_cols;
  }
  return out;
}

}  // namespace usplit
