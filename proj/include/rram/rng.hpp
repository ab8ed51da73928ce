#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace rram {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * xoshiro256** 1.0 (Blackman & Vigna), the only generator used by the
 * simulator. Version tag "xoshiro256ss-1".
 *
 * Seeding: the four state words are the first four outputs of SplitMix64
 * started at `seed`. A substream keyed by (k1, k2, ...) is seeded from
 * the value obtained by folding each key into a SplitMix64 chain:
 *
 *     s = seed
 *     for k in keys: s = splitmix64_next(s ^ (k * 0xD1B54A32D192ED03))
 *
 * and then seeding as above from `s`. Experiments key trials by
 * (condition tag, trial index) so results do not depend on how trials are
 * distributed across worker threads.
 *
 * Satisfies UniformRandomBitGenerator; the distribution helpers below are
 * implemented here rather than taken from <random> so that output is
 * bit-identical across standard library implementations.
 */
class Rng {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kName = "xoshiro256ss-1";

  explicit Rng(std::uint64_t seed = 0) noexcept { reseed(seed); }

  static Rng substream(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t s = seed;
    for (std::uint64_t k : keys) {
      std::uint64_t x = s ^ (k * 0xD1B54A32D192ED03ULL);
      s = splitmix64(x);
    }
    return Rng(s);
  }

  static Rng from_state(const std::array<std::uint64_t, 4>& words) noexcept {
    Rng r;
    r.s_ = words;
    return r;
  }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
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

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Unbiased (rejection on the low range).
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal deviate via Box-Muller; consumes exactly two words.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sigma) noexcept {
    return mean + sigma * normal();
  }

  /// Lognormal parameterised by its median and log-space shape.
  double lognormal(double median, double sigma) noexcept {
    return median * std::exp(sigma * normal());
  }

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace rram
