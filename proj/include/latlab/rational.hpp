#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace latlab {

// All real quantities are exact rationals; all lengths are tracked as exact
// squared norms. No floating point anywhere in the numeric kernel.
using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

// Canonicalized rational from a (possibly non-reduced) numerator/denominator.
Rat make_rat(const Int& num, const Int& den);

// floor(x), ceil(x) as integers.
Int floor_rat(const Rat& x);
Int ceil_rat(const Rat& x);

// Nearest integer; exact halves round toward the even integer.
Int round_half_even(const Rat& x);

// Integer powers. pow_rat requires e >= 0.
Int pow_int(const Int& base, unsigned long e);
Rat pow_rat(const Rat& base, unsigned long e);

// Exact test  x_sq <= g^(2p/q) * y_sq  for positive y_sq, gamma g >= 1,
// integers p >= 0, q >= 1. Used for bounds with fractional exponents
// (gamma^{n/a} and friends) without ever leaving integer arithmetic.
bool le_scaled_pow(const Rat& x_sq, const Rat& gamma, unsigned long p,
                   unsigned long q, const Rat& y_sq);

// Vector helpers.
Rat dot(const RatVec& a, const RatVec& b);
Rat norm_sq(const RatVec& a);
RatVec vec_add(const RatVec& a, const RatVec& b);
RatVec vec_sub(const RatVec& a, const RatVec& b);
RatVec vec_scale(const RatVec& a, const Rat& c);
bool is_zero_vec(const RatVec& a);

// Lexicographic order on integer vectors (signed compare, index 0 first).
bool lex_less(const IntVec& a, const IntVec& b);
IntVec vec_neg(const IntVec& a);
// Whether the first nonzero entry is positive (zero vector -> false).
bool lex_positive(const IntVec& a);
// The vector or its negation, whichever has a positive leading nonzero entry.
IntVec canonical_sign(const IntVec& a);

// Lexicographic order on rational vectors.
bool lex_less_rat(const RatVec& a, const RatVec& b);

// Integer-coefficient collinearity test (u parallel to v, both nonzero).
bool parallel(const IntVec& u, const IntVec& v);

// Parsing and serialization. Rationals read and write as "num/den" with the
// denominator omitted when it is 1; exact round-trip, lowest terms on write.
Rat parse_rat(const std::string& s);
std::string to_string(const Rat& x);
std::string to_string(const RatVec& v);

// Stable 64-bit content hash (FNV-1a over canonical decimal serializations).
uint64_t content_hash(const RatMat& m);
uint64_t content_hash_vec(const RatVec& v, uint64_t seed);

// Exact serialization key for cache maps.
std::string serialize(const RatMat& m);

}  // namespace latlab
