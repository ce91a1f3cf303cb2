#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace zspa {

/// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, increment
/// 0x9E3779B97F4A7C15, finalizer multipliers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB. Outputs are part of the on-disk contract for the
/// random baseline and scenario generator, so the algorithm is pinned by
/// `kName` and never changed in place.
class SplitMix64 {
 public:
  static constexpr std::string_view kName = "splitmix64-v1";

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, bound) by Lemire's multiply-shift with rejection.
  /// bound must be >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  /// Double in [0, 1) from the top 53 bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal by the Box-Muller transform; no cached second variate,
  /// so every call consumes exactly two outputs.
  double normal() noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// First `count` positions of a Fisher-Yates shuffle of [0, n), drawn with
/// uniform_below(n - i) at step i.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    SplitMix64& rng);

}  // namespace zspa
