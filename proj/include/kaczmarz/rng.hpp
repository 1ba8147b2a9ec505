#pragma once

// Portable random streams. Everything here is specified bit-for-bit so that a
// reimplementation in another language reproduces the same permutations and
// noise realizations:
//
//   seeding   : state[i] = splitmix64 applied four times to the 64-bit seed
//   generator : xoshiro256** (Blackman & Vigna), 64-bit output
//   uniform   : (next() >> 11) * 2^-53, in [0, 1)
//   bounded   : rejection sampling, reject r < (2^64 - k) mod k, return r mod k
//   gaussian  : Box-Muller, u1 = 1 - uniform() in (0, 1], u2 = uniform(),
//               returns sqrt(-2 ln u1) cos(2 pi u2) (the sine branch is unused)
//   substream : seed_i = splitmix64(seed ^ splitmix64(i + 1))

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace kaczmarz {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

/// Seed of the i-th independent substream derived from a master seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 1));
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next(); }

  result_type next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, k), k >= 1, without modulo bias.
  std::uint64_t bounded(std::uint64_t k) {
    const std::uint64_t threshold = (0 - k) % k;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % k;
    }
  }

  double gaussian() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

  friend bool operator==(const Xoshiro256&, const Xoshiro256&) = default;

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

/// Fisher-Yates shuffle of 0..m-1, walking i = m-1 down to 1 with j = bounded(i+1).
inline std::vector<std::size_t> random_permutation(std::size_t m, Xoshiro256& rng) {
  std::vector<std::size_t> p(m);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = m; i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.bounded(i + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

}  // namespace kaczmarz
