#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace precedence {

/// Seeded 64-bit Mersenne Twister with portable derived distributions.
///
/// The standard library distributions are implementation-defined, so every
/// draw used by the simulation goes through the helpers below. Given the same
/// seed, a sequence of calls yields the same values on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for `stream_id` under `master_seed`. Streams derived
  /// this way do not depend on the order in which they are created.
  static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform integer in [0, n). Unbiased (Lemire's multiply-and-reject).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal variate (Box-Muller, one value per call).
  double normal();

  /// Index drawn with probability proportional to `weights`. Weights need not
  /// be normalized but must be nonnegative with a positive sum.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace precedence
