#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

// Deterministic, splittable random streams.  Substreams are derived from
// (seed, tag, index) by a splitmix64-based mixer, so a replication's stream
// depends only on those values and never on thread scheduling.
namespace usplit::random {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += kGolden;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// One splitmix64 output without carrying state.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  std::uint64_t s = x;
  return splitmix64(s);
}

// Compile-time FNV-1a, used to tag substreams by purpose.
inline constexpr std::uint64_t stream_tag(const char* s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  while (*s) {
    h ^= static_cast<unsigned char>(*s++);
    h *= 0x100000001B3ull;
  }
  return h;
}

class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 1) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~0ull; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Marsaglia polar method; consumes a variable number of uniforms but a
  // fixed, data-independent amount per accepted pair.
  void normal_pair(double& z0, double& z1) noexcept {
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    z0 = u * f;
    z1 = v * f;
  }

  double normal() noexcept {
    double z0, z1;
    normal_pair(z0, z1);
    return z0;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Deterministic substream for (seed, tag, index).
inline Xoshiro256pp make_stream(std::uint64_t seed, std::uint64_t tag,
                                std::uint64_t index) noexcept {
  std::uint64_t s = seed;
  s = mix64(s ^ mix64(tag));
  s = mix64(s ^ mix64(index));
  return Xoshiro256pp(s);
}

inline void fill_normals(Xoshiro256pp& rng, double* out,
                         std::size_t n) noexcept {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) rng.normal_pair(out[i], out[i + 1]);
  if (i < n) {
    double z0, z1;
    rng.normal_pair(z0, z1);
    out[i] = z0;
  }
}

}  // namespace usplit::random
