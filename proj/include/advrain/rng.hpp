#pragma once

#include <cstdint>

namespace advrain {

/// Counter-based generator: value i of a stream is the SplitMix64 finalizer
/// applied to seed + (i + 1) * 0x9E3779B97F4A7C15, i.e. exactly the i-th output
/// of a SplitMix64 generator started at `seed`. Any position can be reached in
/// O(1), so parallel consumers can jump to their own offsets.
///
/// Doubles take the top 53 bits: u = (x >> 11) * 2^-53, in [0, 1).
/// Child streams: split(key) seeds a new stream with mix(seed ^ mix(key + gamma)).
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : seed_(seed), counter_(counter) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Stateless access to position i.
  constexpr std::uint64_t at(std::uint64_t i) const noexcept {
    return mix(seed_ + (i + 1) * kGamma);
  }

  std::uint64_t next_u64() noexcept { return at(counter_++); }
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  /// Uniform in [0, bound) via floor(u * bound).
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(bound));
  }

  CounterRng split(std::uint64_t key) const noexcept {
    return CounterRng(mix(seed_ ^ mix(key + kGamma)));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace advrain
