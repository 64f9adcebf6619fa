#pragma once

#include <cstdint>
#include <vector>

#include "latlab/solvers.hpp"

namespace latlab {

// One random-sublattice sample: L' = {y in L : <z, coeffs(y)> = 0 mod p},
// where coeffs(y) is the integer coefficient vector of y in the given basis.
struct SparsificationSample {
  Int prime_p;
  IntVec z;           // residue representatives in [0, p)
  RatMat sublattice;  // basis of L'
  IntMat transform;   // sublattice = transform * basis; det +-p, or +-1 if z = 0
};

// Deterministic sparsifier: the caller supplies z (typically seeded-uniform).
// For z = 0 the sublattice is the whole lattice. Otherwise the smallest index
// j with z_j != 0 mod p pivots the construction
//   b'_i = b_i - ((z_i z_j^{-1}) mod p) b_j  (i != j),   b'_j = p b_j,
// whose rows generate exactly the kernel sublattice of index p.
SparsificationSample sparsify(const RatMat& basis, const Int& p, const IntVec& z);

// Canonical primitive representatives of squared length <= radius_sq: one
// point per pair {x, -x} (the one with lexicographically positive
// coefficients), sorted by squared length, then coefficient order. Their
// number is the primitive point count used throughout the probability
// calculations below.
std::vector<LatticePoint> primitive_representatives(const RatMat& basis, const Rat& radius_sq,
                                                    const EnumerationBudget& budget = {});

// Exact probability, over all p^n choices of z, of the event
//   lambda_1(L') <= r1  and  lambda_2(L') > r2.
// Requires r1 <= r2 < p * lambda_1 (the right inequality keeps p-multiples of
// short vectors out of the r2 ball, so membership of the enumerated
// primitive representatives decides the event exactly). r1 below lambda_1
// makes the event impossible and returns zero. The z-space size p^n must not
// exceed budget.max_nodes.
Rat exact_sparsification_probability(const RatMat& basis, const Int& p, const Rat& r1_sq,
                                     const Rat& r2_sq, const EnumerationBudget& budget = {});

// Exact probability that representative `which` (index into
// primitive_representatives(basis, r2_sq)) survives sparsification while
// every other representative within r2 is removed. These single-vector
// events are disjoint across `which`, and the full event above is their
// union over the representatives of length <= r1.
Rat exact_single_vector_probability(const RatMat& basis, const Int& p, const Rat& r2_sq,
                                    size_t which, const EnumerationBudget& budget = {});

// Exact-integer form of the hypothesis xi <= p / (20 log p), log base 2:
// equivalent to p^(20 xi) <= 2^p, compared in exact arithmetic.
bool sparsification_condition(const Int& p, const Int& xi);

// Monte-Carlo companion for z-spaces too large to exhaust.
struct SparsificationStats {
  long long trials = 0;
  long long hits = 0;
  Rat frequency;    // hits / trials
  Rat bound_lower;  // xi(r1)/p * (1 - xi(r2)/p)
  Rat bound_upper;  // xi(r1)/p
  bool consistent = false;  // frequency inside the bounds up to the 5-sigma band
};

// Seeded-uniform z draws (one independent stream per trial index, so trial
// ranges can be partitioned across workers) with the same event test as the
// exact calculator. `consistent` compares the frequency against
// [bound_lower, bound_upper] with an exact Chebyshev band of five standard
// errors on each side; no floating point is involved.
SparsificationStats sample_sparsification_stats(const RatMat& basis, const Int& p,
                                                const Rat& r1_sq, const Rat& r2_sq,
                                                long long trials, uint64_t seed,
                                                const EnumerationBudget& budget = {});

// Exact band test used by the `consistent` flag, reusable against any
// reference probability: (freq - ref)^2 * trials <= sigmas^2 * ref * (1 - ref).
bool frequency_consistent(const SparsificationStats& stats, const Rat& reference,
                          long sigmas = 5);

}  // namespace latlab
