#pragma once
#include <cmath>
#include <cstdint>

namespace magloc {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic xoshiro256++ stream. The bit sequence depends only on the
/// seed path, never on platform or standard-library internals, so results
/// reproduce bit-for-bit across runs and thread counts. Not thread-safe:
/// one stream per caller, derive children for parallel work.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  /// Independent child stream keyed by `tag`. Children of distinct tags,
  /// and the parent itself, do not overlap in practice (distinct splitmix
  /// seed paths).
  RngStream child(std::uint64_t tag) const {
    std::uint64_t sm = state_[0] ^ (0xa5a5a5a5a5a5a5a5ULL + tag);
    sm = detail::splitmix64(sm) ^ state_[2];
    RngStream c(0);
    std::uint64_t sm2 = sm;
    for (auto& word : c.state_) word = detail::splitmix64(sm2);
    return c;
  }

  std::uint64_t next_u64() {
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

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Bernoulli draw: true with probability p.
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4] = {};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable seed for a trial keyed by up to three indices, derived from the
/// root experiment seed. Used to give every (site, budget, repetition)
/// trial its own stream regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t k0,
                                 std::uint64_t k1 = 0, std::uint64_t k2 = 0) {
  std::uint64_t sm = root;
  detail::splitmix64(sm);
  sm ^= 0x517cc1b727220a95ULL * (k0 + 1);
  detail::splitmix64(sm);
  sm ^= 0x2545f4914f6cdd1dULL * (k1 + 1);
  detail::splitmix64(sm);
  sm ^= 0x9e3779b97f4a7c15ULL * (k2 + 1);
  return detail::splitmix64(sm);
}

}  // namespace magloc
