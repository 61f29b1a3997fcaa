#pragma once
// Deterministic, splittable random streams. xoshiro256** seeded through
// splitmix64; Box-Muller normals. Self-contained so that draws are
// identical across platforms and standard libraries.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace aide {

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
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : origin_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

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

  // Uniform in [0,1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Independent child stream derived from this stream's seed identity and a
  // label. Splitting does not consume draws from the parent, so module
  // initialization order cannot perturb other components' streams.
  RngStream split(std::string_view label) const {
    std::uint64_t mix = origin_ ^ detail::fnv1a(label);
    return RngStream(detail::splitmix64(mix));
  }

  RngStream split(std::string_view label, std::uint64_t index) const {
    std::uint64_t mix = origin_ ^ detail::fnv1a(label) ^
                        (0x9e3779b97f4a7c15ULL * (index + 1));
    return RngStream(detail::splitmix64(mix));
  }

  std::uint64_t origin() const { return origin_; }

 private:
  std::uint64_t state_[4] = {};
  std::uint64_t origin_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Root stream for a run. Components should take sub-streams via split().
inline RngStream seeded_rng(std::uint64_t seed) { return RngStream(seed); }

}  // namespace aide
