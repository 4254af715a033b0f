#pragma once

#include <array>
#include <cstdint>

namespace stratvar {

/// SplitMix64 (Steele, Lea & Flood 2014). Used to expand 64-bit seeds into
/// generator state and to derive substream seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the substream (master_seed, stream_index). Replications draw from
/// substreams 1,2,...; the population draw owns substream 0, so results are
/// independent of scheduling order and of the replication count.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream_index);

/// xoshiro256++ (Blackman & Vigna 2019), state expanded from the seed via
/// SplitMix64. Bit-reproducible for a fixed seed across runs of a build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng substream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return Rng(substream_seed(master_seed, stream_index));
  }

  std::uint64_t next();

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform01();

  /// Uniform on the open interval (0,1); safe for inverse-CDF transforms.
  double uniform_open01();

  /// Unbiased uniform integer in [0, bound), bound >= 1, by rejection.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal deviate via the inverse-CDF transform of uniform_open01().
  double normal();

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace stratvar
