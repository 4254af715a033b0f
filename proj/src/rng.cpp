#include "stratvar/rng.hpp"

#include "stratvar/normal.hpp"

namespace stratvar {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  // Two finalizer rounds over (master, index); distinct indices land in
  // well-separated SplitMix64 sequences.
  SplitMix64 mixer(master_seed ^ (0xA24BAED4963EE407ULL * (stream_index + 1)));
  std::uint64_t s = mixer.next();
  s ^= stream_index + 0x9FB21C651E98DF25ULL;
  return SplitMix64(s).next();
}

Rng::Rng(std::uint64_t seed) {
  SplitMix64 mixer(seed);
  for (auto& word : state_) word = mixer.next();
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open01() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t threshold = -bound % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double Rng::normal() { return normal_quantile(uniform_open01()); }

}  // namespace stratvar
