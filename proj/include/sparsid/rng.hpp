#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace sparsid {

/// Counter-based deterministic random stream (SplitMix64).
///
/// The state advances by a fixed odd increment and each output is a
/// bijective mix of the counter, so streams derived from distinct keys are
/// statistically independent and reproducible across platforms. Uniform
/// doubles are produced from the top 53 bits, never through
/// std::uniform_real_distribution (whose output is implementation-defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [-half_width, +half_width].
  double next_symmetric(double half_width) { return half_width * (2.0 * next_uniform() - 1.0); }

  /// Standard normal via Box-Muller (two uniforms per pair, one cached).
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds an ordered tuple of integers into a stream key. Order matters.
inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t key = 0x243f6a8885a308d3ULL;
  for (std::uint64_t p : parts) key = mix64(key ^ mix64(p));
  return key;
}

}  // namespace sparsid
