#pragma once

#include <cstdint>
#include <limits>

namespace exclab {

/// Counter-based random stream.
///
/// Each output is a pure function of (key, counter): the SplitMix64 finalizer
/// applied to key + counter * golden-gamma. Substreams are derived with
/// split(), so trial i of a Monte-Carlo run always sees the same numbers no
/// matter how trials are scheduled across threads.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + kGamma))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

  /// Independent child stream; does not advance this stream.
  [[nodiscard]] RngStream split(std::uint64_t id) const {
    RngStream child;
    child.key_ = mix(key_ ^ mix(id * kGamma + 0x632BE59BD9B4E019ULL));
    return child;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound > 0. Unbiased (Lemire).
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  RngStream() = default;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace exclab
