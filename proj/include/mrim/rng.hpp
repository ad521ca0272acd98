#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace mrim {

// splitmix64 finalizer; also used as a stateless hash for edge coins.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream derivation: hash-combines a master seed with a stream index.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

constexpr double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// xoshiro256**, seeded through splitmix64. All randomness in the project
// flows through this generator or through mix64-based stateless coins, so
// runs are reproducible from a single 64-bit master seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
      state_[0] = 1;
    }
  }

  std::uint64_t seed() const { return seed_; }

  // Independent generator for logical stream `stream` of this rng's seed.
  Rng substream(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  std::uint64_t next() {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  double uniform01() { return unit_double(next()); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased integer in [0, bound); bound must be positive.
  std::uint32_t below(std::uint32_t bound) {
    std::uint64_t x = next() & 0xffffffffULL;
    std::uint64_t m = x * bound;
    std::uint32_t l = static_cast<std::uint32_t>(m);
    if (l < bound) {
      std::uint32_t t = (0u - bound) % bound;
      while (l < t) {
        x = next() & 0xffffffffULL;
        m = x * bound;
        l = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

// Stateless per-edge coin shared by all candidates evaluated under the same
// key (common random numbers): coin(e) depends only on (key, e), not on the
// order edges are touched during a traversal.
struct CoinHash {
  std::uint64_t key;
  bool flip(std::uint64_t index, double p) const {
    return unit_double(mix64(key ^ (0xd1342543de82ef95ULL * (index + 1)))) < p;
  }
};

}  // namespace mrim
