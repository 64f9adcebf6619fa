#pragma once

#include <cstdint>

#include "latlab/rational.hpp"

namespace latlab {

// Deterministic Miller-Rabin for 64-bit inputs using the fixed witness set
// {2,3,5,7,11,13,17,19,23,29,31,37}, which decides primality correctly for
// every n < 3.3e24, far beyond the uint64 range used here.
bool is_prime_u64(uint64_t n);

// Primality for big integers: exact for values that fit 64 bits, GMP's
// probabilistic test (40 rounds) beyond that.
bool is_prime(const Int& n);

// Smallest prime strictly greater than lower. Throws CapExceededError if the
// answer would not fit the supported 64-bit prime range.
uint64_t next_prime_above(uint64_t lower);

// Convenience wrapper for big-integer lower bounds (the bound itself must fit
// in the supported range; primes are capped at 2^62 for exact mulmod).
Int next_prime_above(const Int& lower);

}  // namespace latlab
