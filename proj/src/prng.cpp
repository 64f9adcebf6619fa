#include "latlab/prng.hpp"

#include "latlab/error.hpp"

namespace latlab {

uint64_t uniform_below(SplitMix64& g, uint64_t bound) {
  if (bound == 0) throw InvalidParameterError("uniform_below: bound must be >= 1");
  if ((bound & (bound - 1)) == 0) return g.next() & (bound - 1);
  // Reject the tail of the 2^64 range that does not divide evenly.
  uint64_t limit = ~uint64_t(0) - (~uint64_t(0) % bound);
  for (;;) {
    uint64_t v = g.next();
    if (v < limit) return v % bound;
  }
}

}  // namespace latlab
