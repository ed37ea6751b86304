#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fbmr {

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream of uniforms and normals. Element k of stream
/// (seed, key) is a pure function of (seed, key, k), so any path can be
/// regenerated without replaying earlier ones.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t key)
      : base_(mix64(mix64(seed) ^ (key * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL)))
  {}

  std::uint64_t bits(std::uint64_t counter) const
  {
    return mix64(base_ + (counter + 1) * kGamma);
  }

  /// Uniform on the open interval (0,1) with 53 random bits.
  double uniform(std::uint64_t counter) const
  {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal number `index` of the stream (Box-Muller on uniform pairs).
  double normal(std::uint64_t index) const
  {
    const std::uint64_t pair = index >> 1;
    const double u1 = uniform(2 * pair);
    const double u2 = uniform(2 * pair + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (index & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
  }

  /// Fills out[i] = normal(first + i); cheaper than repeated normal() calls.
  template <class Span>
  void normals(Span&& out, std::uint64_t first = 0) const
  {
    std::size_t i = 0;
    const std::size_t count = out.size();
    if ((first & 1) && count > 0) out[i++] = normal(first);
    for (; i + 1 < count; i += 2) {
      const std::uint64_t pair = (first + i) >> 1;
      const double radius = std::sqrt(-2.0 * std::log(uniform(2 * pair)));
      const double angle = 2.0 * std::numbers::pi * uniform(2 * pair + 1);
      out[i] = radius * std::cos(angle);
      out[i + 1] = radius * std::sin(angle);
    }
    if (i < count) out[i] = normal(first + i);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t base_;
};

}  // namespace fbmr
