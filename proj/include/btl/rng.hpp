#pragma once

#include <cstdint>
#include <limits>

namespace btl {

namespace detail {

// SplitMix64 finalizer (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

/// (seed, stream_id) pair that fully determines a random stream.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Child seed for an independent sub-stream (e.g. graph vs. outcomes of the
  /// same trial). Children with different tags never share a key.
  constexpr RngSeed derive(std::uint64_t tag) const {
    return {detail::mix64(seed ^ detail::mix64(tag + detail::kGolden)), stream_id};
  }

  bool operator==(const RngSeed&) const = default;
};

/// Counter-based generator: the i-th output is a pure function of
/// (key(seed, stream_id), i). Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(RngSeed s)
      : key_(detail::mix64(detail::mix64(s.seed) ^ detail::mix64(s.stream_id * detail::kGolden + 1))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    return detail::mix64(key_ + (++counter_) * detail::kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  constexpr bool bernoulli(double prob) { return uniform() < prob; }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  constexpr std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t x = (*this)();
    while (x < threshold) x = (*this)();
    return x % bound;
  }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace btl
