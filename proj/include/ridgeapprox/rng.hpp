#pragma once

#include <cstdint>

namespace ridge {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Output i of a stream is mix(key + (i + 1) * gamma), so any draw can be
/// reproduced from (seed, stream, index) alone and disjoint index ranges can
/// be consumed from different threads. Results are bit-identical across
/// platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    // Multiply-shift reduction; bias is < n / 2^64, irrelevant at desk scale.
    const unsigned __int128 p =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(p >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// +1 or -1 with equal probability.
  int rademacher() noexcept { return (next_u64() >> 63) ? 1 : -1; }

  /// Independent child stream, keyed off this stream's key.
  CounterRng substream(std::uint64_t id) const noexcept {
    return CounterRng(key_, id);
  }

  std::uint64_t position() const noexcept { return counter_; }
  void seek(std::uint64_t position) noexcept { counter_ = position; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ridge
