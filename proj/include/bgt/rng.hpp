#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace bgt {

/// Counter-based 64-bit generator.
///
/// Output i of stream s under key K is mix(K ^ mix(s + 1) + i * golden), where
/// mix is the SplitMix64 finalizer. The whole sequence is a pure function of
/// (key, stream, counter), so streams never overlap in practice and any draw
/// can be reproduced without replaying the ones before it.
///
/// Stream assignment used throughout the library:
///   0  planted set selection           (instance sampling)
///   1  test membership                 (instance sampling)
///   2  cover-instance set membership
///   3  chain initial state
///   4  chain proposals / acceptance
///   5+ free for callers (Monte Carlo baselines etc.)
class CounterRng {
 public:
  using result_type = std::uint64_t;

  enum Stream : std::uint64_t {
    kPlanted = 0,
    kMembership = 1,
    kCoverSets = 2,
    kChainInit = 3,
    kChainMoves = 4,
    kAux = 5,
  };

  CounterRng(std::uint64_t key, std::uint64_t stream) noexcept
      : base_(key ^ mix(stream + 1)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix(base_ + (counter_++) * kGolden); }

  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double prob) noexcept { return uniform01() < prob; }

  /// Number of failures before the first success of a Bernoulli(prob) sequence.
  std::uint64_t geometric(double prob) noexcept {
    if (prob >= 1.0) return 0;
    const double u = 1.0 - uniform01();  // (0, 1]
    const double g = std::floor(std::log(u) / std::log1p(-prob));
    if (!(g < 9.0e18)) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(g);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace bgt
