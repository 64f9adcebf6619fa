#include "latlab/primes.hpp"

#include "latlab/error.hpp"

namespace latlab {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod(uint64_t base, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    e >>= 1;
  }
  return r;
}

constexpr uint64_t kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : kWitnesses) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : kWitnesses) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

uint64_t next_prime_above(uint64_t lower) {
  constexpr uint64_t kMax = uint64_t(1) << 62;
  if (lower >= kMax) throw CapExceededError("next_prime_above: bound exceeds supported range");
  uint64_t c = lower + 1;
  if (c <= 2) return 2;
  if ((c & 1) == 0) ++c;
  for (;; c += 2) {
    if (c >= kMax) throw CapExceededError("next_prime_above: no prime found in supported range");
    if (is_prime_u64(c)) return c;
  }
}

Int next_prime_above(const Int& lower) {
  if (sgn(lower) < 0) return Int(2);
  if (!lower.fits_ulong_p())
    throw CapExceededError("next_prime_above: bound exceeds supported range");
  return Int(static_cast<unsigned long>(next_prime_above(lower.get_ui())));
}

bool is_prime(const Int& n) {
  if (sgn(n) <= 0) return false;
  if (n.fits_ulong_p()) return is_prime_u64(n.get_ui());
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

}  // namespace latlab
