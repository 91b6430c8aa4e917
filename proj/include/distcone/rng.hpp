/**
 * Seeded, splittable random streams with portable output.
 *
 * The core generator is xoshiro256** seeded through splitmix64. All
 * distributions are implemented here rather than via <random> so that a
 * (generator id, seed) pair reproduces identical streams on any platform.
 * Child streams are derived from the original seed, not the current state,
 * so split(k) is independent of how many draws happened before the split.
 */

#ifndef DISTCONE_RNG_HPP
#define DISTCONE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace distcone {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = detail::splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Derives an independent stream addressed by `stream`; stable under draws.
  Rng split(std::uint64_t stream) const {
    std::uint64_t sm = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    detail::splitmix64(sm);
    return Rng(detail::splitmix64(sm));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  double exponential(double rate) {
    double u;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  /// Marsaglia polar method; the spare is kept for the next call.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  double half_normal(double sigma) { return std::abs(normal()) * sigma; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Radical-inverse (van der Corput) sequence in base 2; s >= 1.
inline double van_der_corput(std::uint64_t s) {
  double result = 0.0;
  double f = 0.5;
  while (s > 0) {
    result += f * static_cast<double>(s & 1);
    s >>= 1;
    f *= 0.5;
  }
  return result;
}

}  // namespace distcone

#endif  // DISTCONE_RNG_HPP
