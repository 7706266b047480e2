#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace patterndyn {

/// SplitMix64 finalizer; used to derive seeds, never as a stream on its own.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Well-known stream ids. Each names an independent substream of a master seed.
namespace stream {
inline constexpr std::uint64_t patterns = 1;
inline constexpr std::uint64_t init = 2;
inline constexpr std::uint64_t data = 3;
inline constexpr std::uint64_t test = 4;
inline constexpr std::uint64_t dataset = 5;
inline constexpr std::uint64_t probes = 6;
inline constexpr std::uint64_t sweep = 7;
}  // namespace stream

/// xoshiro256** seeded from a 64-bit key through SplitMix64.
///
/// Substreams are derived from (key, id) by hashing, so a run's draws depend
/// only on its master seed and the stream path, never on thread scheduling.
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  /// Independent generator for stream `id` below this one's key.
  Rng substream(std::uint64_t id) const noexcept;

  std::uint64_t key() const noexcept { return key_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  double normal() { return normal_(*this); }
  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// +1 or -1 with equal probability.
  int sign() noexcept { return ((*this)() >> 63) ? 1 : -1; }

 private:
  std::uint64_t key_;
  std::uint64_t s_[4];
  std::normal_distribution<double> normal_;
};

}  // namespace patterndyn
