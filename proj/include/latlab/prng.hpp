#pragma once

#include <cstdint>

namespace latlab {

// splitmix64: tiny, fast, well-mixed 64-bit generator. Chosen because its
// output sequence is pinned by the reference constants, so every seeded
// experiment replays bit-for-bit on any platform and standard library.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Deterministic combiner for deriving per-(seed, index...) streams. The
// first argument is avalanched before the second is added: both arguments
// are usually small dense values (user seeds, repetition counters), and
// combining them linearly would fold thousands of pairs onto the same
// state. With a avalanched, collisions need b' - b to hit a 64-bit
// difference of two avalanche outputs. next() is a bijection of the state,
// so for a fixed first argument the combiner is injective in the second.
inline uint64_t mix64(uint64_t a, uint64_t b) {
  SplitMix64 g(a);
  SplitMix64 h(g.next() + b);
  return h.next();
}

inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) {
  return mix64(mix64(a, b), c);
}

// Uniform draw in [0, bound) by rejection; bound >= 1. Unbiased and portable
// (std::uniform_int_distribution is not specified bit-for-bit).
uint64_t uniform_below(SplitMix64& g, uint64_t bound);

}  // namespace latlab
