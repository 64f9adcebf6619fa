#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "latlab/oracles.hpp"
#include "latlab/solvers.hpp"

namespace latlab {

// Outcome of one reduction run. output_point carries exact coefficients over
// the input basis; achieved_factor_sq compares the output against the exact
// optimum (squared), so 1 means the run was exactly optimal. parameters is a
// flat, serializable record of everything that determined the run (factors,
// exponents, primes, seeds, annotations added by normalization steps).
struct ReductionReport {
  LatticePoint output_point;
  Rat achieved_factor_sq = Rat(1);
  std::shared_ptr<OracleAudit> audit;
  std::map<std::string, std::string> parameters;
  // Largest number of recursion paths explored at any one branching stage
  // (guided closest-vector search only; 0 elsewhere).
  long long explored_paths = 0;
};

// Ceiling on the total number of sparsification samples (repetitions times
// levels) a single randomized-search run may draw. Exceeding it throws
// CapExceededError instead of silently running for hours.
long long default_sample_budget();

// ---- exact parameter arithmetic (no floating point anywhere) ----

// k = ceil(4^(a*n/(n-a))) for rational 0 < a < n, via an exact integer root.
Int usvp_repetition_count(size_t n, const Rat& a);

// Number of sparsification levels minus one: floor(n / a).
long usvp_level_count(size_t n, const Rat& a);

// Smallest prime p with p > 2*k^(level+1). The doubling-interval upper bound
// p < 4*k^(level+1) always holds for the returned prime and is re-checked;
// its failure would be an internal error, not an input error.
Int usvp_level_prime(const Int& k, long level);

// The randomized search needs 2^a > gamma^n. Returns max(a, c + 1) where c
// is the smallest integer with 2^c >= gamma^n; sets *raised when the input
// was bumped.
Rat enforce_exponent_assumption(size_t n, const Rat& gamma, const Rat& a, bool* raised);

// Smallest m >= 1 with (p/gamma)^(2m) >= n * 2^(n+2), i.e. the exact value
// of ceil((n + log2 n + 2) / (2 log2(p/gamma))). Requires gamma^2 < p.
long det_cvp_level_count(size_t n, const Int& p, const Rat& gamma);

// Smallest m >= 1 with (p/gamma^2)^m >= 2^(n+3), i.e. the exact value of
// ceil((n + 3) / log2(p/gamma^2)). Requires gamma^3 < p.
long det_svp_level_count(size_t n, const Int& p, const Rat& gamma);

// N = ceil(n^(1/epsilon)) for rational 0 < epsilon < 1. Throws
// CapExceededError when N would exceed the desk-scale rank cap.
size_t padded_rank(size_t n, const Rat& epsilon, size_t rank_cap = EnumerationBudget{}.rank_cap);

// Smallest multiple q/64 of 1/64 with q/64 >= 2*n*log2(gamma) + log2(n+1),
// decided by the exact comparison 2^q >= gamma^(128 n) * (n+1)^64.
Rat chain_exponent(size_t n, const Rat& gamma);

// ---- reductions ----

// Randomized search-to-search reduction: repeats k times over levels
// i = 0..floor(n/a), sparsifies with a fresh seeded z mod the level prime,
// asks the unique-shortest oracle on every sublattice, validates each answer
// for membership and nonzeroness, and returns the shortest valid candidate.
// Preconditions: gamma >= 1, 0 < a; a is clamped to n/2 from above (larger
// values only weaken the target factor) and raised to meet 2^a > gamma^n,
// both with report annotations. When a ends up below log2(n+1) the run is
// still performed but the gamma^(n/a) success guarantee is not claimed;
// the report carries a_below_theorem_range=1.
// Throws NoValidCandidateError when every oracle answer failed validation.
ReductionReport svp_to_usvp(const RatMat& basis, const Rat& gamma, const Rat& a,
                            const std::shared_ptr<UsvpOracle>& oracle, uint64_t seed,
                            long long sample_budget = default_sample_budget());

// Same search, but the unique-shortest oracle is simulated from a gapped
// decision policy (the decision-to-unique-shortest leg is prior work outside
// this library, so the report records lm09_simulated=1). Policy mapping:
// HONEST_THRESHOLD and ADVERSARIAL_NO -> SHORTEST_ANYWAY (a NO-leaning gap
// oracle decides exactly like the honest threshold), ADVERSARIAL_YES and
// SEEDED_RANDOM -> ARBITRARY_SEEDED (in-gap lies surface as arbitrary but
// replayable promise-violation outputs).
ReductionReport svp_to_gapsvp(const RatMat& basis, const Rat& gamma, const Rat& a,
                              const OraclePolicy& gapsvp_policy, uint64_t seed,
                              long long sample_budget = default_sample_budget());

// Gapped shortest-vector decisions answered through a gapped closest-vector
// oracle: YES iff any of the n queries (basis with row j doubled, target
// b_j, same threshold) answers YES. Valid for the same gap factor.
class DerivedGapSvpOracle {
 public:
  explicit DerivedGapSvpOracle(std::shared_ptr<GapOracle> gapcvp);

  bool decide(const RatMat& basis, const Rat& d_sq) const;

  const Rat& gamma() const;
  const std::shared_ptr<GapOracle>& inner() const { return inner_; }

 private:
  std::shared_ptr<GapOracle> inner_;
};

DerivedGapSvpOracle gapsvp_from_gapcvp(const std::shared_ptr<GapOracle>& gapcvp_oracle);

// Guided hyperplane search for the closest vector. Each stage obtains a
// short dual vector from the h-approximate oracle, completes it to a dual
// basis, and scans the index window floor(a - h*m) .. ceil(a + h*m) around
// a = <b*_1, t>; branching explores every index choice to depth ell (stages
// share the sublattice chain, so only targets multiply), evaluates each leaf
// with estimate_via_decision — exactly, once leaves reach rank 1 — and keeps
// the path with the smallest estimate (ties: lexicographically first, i.e.
// smallest index at each level). Recurses on the winning leaf until rank 1.
// Guarantee, for every valid oracle policy: final distance is at most
// gamma^(n/ell) times the true distance. explored_paths in the report is
// the largest per-stage leaf count, at most (2hn+2)^ell.
ReductionReport cvp_guided(const RatMat& basis, const RatVec& target, long ell,
                           const Rat& gamma, const std::shared_ptr<GapOracle>& gapcvp_oracle,
                           const std::shared_ptr<HsvpOracle>& hsvp_oracle);

// Inner closest-vector step used by cvp_to_svp_wrapper on rank n-1
// sub-instances. Receives (sub_basis, shifted_target), returns a lattice
// point of the sub-basis.
using CvpSubSolver = std::function<LatticePoint(const RatMat&, const RatVec&)>;

// Exact inner step (enumeration), for testing the wrapper in isolation.
CvpSubSolver exact_sub_cvp();

// Heuristic inner step: embed the target with a height near the nearest-
// plane distance, ask the approximate shortest-vector oracle, and recover a
// candidate from a +-1 last coordinate, falling back to the nearest-plane
// point; returns whichever is closer. No approximation factor is claimed.
CvpSubSolver kannan_sub_cvp(const std::shared_ptr<HsvpOracle>& svp_oracle);

// Closest-vector search from one short dual vector: obtain b*_1 with
// 0 < |b*_1| <= h*lambda1(dual) (h <= 2 required — the fixed scan width
// floor(a)-n .. ceil(a)+n is only wide enough for that), complete to a dual
// basis, solve the shifted sub-instance on the associated primal sublattice
// for every index in the window, and return the best candidate (ties:
// smallest index).
ReductionReport cvp_to_svp_wrapper(const RatMat& basis, const RatVec& target,
                                   const std::shared_ptr<HsvpOracle>& svp_oracle,
                                   const CvpSubSolver& inner_cvp);

// Embedding of a closest-vector instance into a shortest-vector instance one
// rank higher: rows (b_i, 0) plus (target, height). A short embedded vector
// whose last coordinate is +-height yields a candidate lattice point near
// the target. Heuristic device; no approximation factor is claimed.
RatMat kannan_embed(const RatMat& basis, const RatVec& target, const Rat& embedding_height);

// Deterministic closest-vector search from a gapped decision oracle, for any
// integer p >= 2 with gamma^2 < p. Per recursion level (rank m): LLL-reduce,
// then for i = 0..ell-1 pick the residue j in 0..p-1 minimizing the
// estimated distance from t_i - j*p^i*b_m to the index-p^(i+1) sublattice
// (ties: smallest j); recenter with a half-even rounding along the last
// Gram-Schmidt direction; recurse on the first m-1 rows. Guarantee, for
// every valid oracle policy: distance at most gamma^(ell*n) times optimal.
ReductionReport det_cvp(const RatMat& basis, const RatVec& target, const Int& p,
                        const Rat& gamma, const std::shared_ptr<GapOracle>& gapcvp_oracle);

// Deterministic shortest-vector search from a gapped decision oracle, for
// prime p with gamma^3 < p. Maintains coefficients (a1, a2, a3) = (1, 0, 1)
// over the last two rows of the LLL-reduced basis; each of ell steps
// estimates lambda1 on the p+1 candidate sublattices
//   j < p:  (b_1..b_{m-2}, a1*b_{m-1} + (a2 + j*a3)*b_m, p*a3*b_m)
//   j = p:  (b_1..b_{m-2}, p*(a1*b_{m-1} + a2*b_m), a3*b_m)
// and keeps the minimum (ties: smallest j), updating
//   j < p:  (a1, a2 + j*a3, p*a3)
//   j = p:  (p*a1, p*a2, a3).
// After ell steps it compares the powers of p dividing a1 and a3 and drops
// b_{m-1} or b_m accordingly, then recurses on the rank m-1 sublattice.
// Guarantee, for every valid oracle policy: length at most gamma^(ell*n)
// times lambda1.
ReductionReport det_svp(const RatMat& basis, const Int& p, const Rat& gamma,
                        const std::shared_ptr<GapOracle>& gapsvp_oracle);

// Rank padding for unique-shortest instances: appends N - n pairwise
// orthogonal vectors of length exactly 3*|b_1|, realized as copies of 3*b_1
// placed in fresh coordinate blocks so every entry stays rational. Keeps
// lambda1 and the original shortest vector; the second minimum becomes
// min(lambda2, 3*|b_1|).
RatMat pad_usvp(const RatMat& basis, const Rat& epsilon);

// Composed closest-vector chain: a = chain_exponent(n, gamma) makes the
// randomized search a sqrt(2)-factor shortest-vector solver, which supplies
// the short dual vector for the window scan; the rank n-1 sub-instances are
// solved through the embedding heuristic whose shortest-vector solves run
// the same randomized search. With exact_inner_leg the dual solve and the
// sub-instances use exact enumeration instead (then gamma = 1 gives the
// exact closest vector). The achieved factor is measured against the exact
// optimum, never asserted: the inner embedding leg carries no guarantee.
ReductionReport cvp_chain_via_usvp(const RatMat& basis, const RatVec& target,
                                   const Rat& gamma, uint64_t seed,
                                   bool exact_inner_leg = false,
                                   long long sample_budget = default_sample_budget());

}  // namespace latlab
