#include "latlab/reductions.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "latlab/basis.hpp"
#include "latlab/error.hpp"
#include "latlab/lattice_core.hpp"
#include "latlab/primes.hpp"
#include "latlab/prng.hpp"
#include "latlab/sparsify.hpp"

namespace latlab {

namespace {

// Guards for the exact-exponent helpers: they work with numbers of roughly
// this many bits, so finer-grained rationals are rejected up front.
constexpr unsigned long kExponentBitCap = 1'000'000;
constexpr long kLevelCap = 10'000;
constexpr long kResidueCap = 65'536;  // largest modulus the det loops scan

std::string int_str(const Int& x) { return x.get_str(); }

void put(std::map<std::string, std::string>& params, const std::string& key,
         const std::string& value) {
  params[key] = value;
}

Rat safe_factor(const Rat& out_sq, const Rat& opt_sq) {
  if (sgn(opt_sq) == 0) {
    if (sgn(out_sq) == 0) return Rat(1);
    throw Error("reduction missed a zero-distance optimum");
  }
  Rat f = out_sq / opt_sq;
  f.canonicalize();
  return f;
}

// Output points must lie in the input lattice; anything else is a bug in the
// reduction, not an input error.
LatticePoint checked_point(const CoeffSolver& solver, const RatVec& coords) {
  IntVec coeffs;
  if (!solver.integer_coefficients(coords, coeffs))
    throw Error("reduction produced a point outside the lattice");
  return LatticePoint{coords, coeffs, norm_sq(coords)};
}

void merge_audit(OracleAudit& into, const OracleAudit& from) {
  into.total_calls.fetch_add(from.total_calls.load());
  into.decision_probes.fetch_add(from.decision_probes.load());
  into.estimate_calls.fetch_add(from.estimate_calls.load());
  into.search_calls.fetch_add(from.search_calls.load());
  into.note_dimension(static_cast<size_t>(from.max_call_dimension.load()));
}

unsigned long checked_ulong(const Int& x, const char* what) {
  if (sgn(x) < 0 || !x.fits_ulong_p() || x.get_ui() > kExponentBitCap)
    throw CapExceededError(std::string(what) + " exceeds the exact-arithmetic cap");
  return x.get_ui();
}

// Floor approximation of sqrt(x) as a rational: isqrt(num*den)/den. Positive
// for positive x and within 1/den of the true root; good enough for an
// embedding height, which only needs to be near the distance scale.
Rat approx_sqrt(const Rat& x) {
  if (sgn(x) <= 0) return Rat(1);
  Int prod = x.get_num() * x.get_den();
  Int root;
  mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
  if (sgn(root) == 0) root = 1;
  return make_rat(root, x.get_den());
}

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::HONEST_THRESHOLD: return "honest-threshold";
    case PolicyKind::ADVERSARIAL_YES: return "adversarial-yes";
    case PolicyKind::ADVERSARIAL_NO: return "adversarial-no";
    case PolicyKind::SEEDED_RANDOM: return "seeded-random";
  }
  return "unknown";
}

// Shared by the window-scanning closest-vector searches: completes the given
// short dual vector to a dual basis and hands back the associated primal
// data (first primal row, its dual partner, and the remaining sublattice).
struct HyperplaneFrame {
  RatVec b1;       // primal row paired with the dual vector
  RatVec dstar;    // primitive dual vector, <dstar, b1> = 1
  RatMat sub;      // primal rows 2..m: the sublattice to recurse into
};

HyperplaneFrame hyperplane_frame(const RatMat& basis, const RatVec& dual_vector) {
  RatMat dual = dual_basis(basis);
  RatMat dual_full = extend_to_basis(dual, dual_vector);
  RatMat primal = dual_basis(dual_full);
  HyperplaneFrame frame;
  frame.dstar = dual_full[0];
  frame.b1 = primal[0];
  frame.sub.assign(primal.begin() + 1, primal.end());
  /* The completion is free to return a wildly skewed coset representative,
   * and window scans shift targets by multiples of b1, so stacked stages
   * would compound that skew past the exact-arithmetic coefficient caps.
   * Replacing b1 by its Babai reduction modulo the sublattice keeps the same
   * coset (and <dstar, b1> = 1, since dstar annihilates the sublattice) with
   * near-minimal length. */
  if (!frame.sub.empty())
    frame.b1 = vec_sub(frame.b1, PreparedLattice(frame.sub).babai(frame.b1).point.coords);
  return frame;
}

}  // namespace

long long default_sample_budget() { return 1LL << 20; }

Int usvp_repetition_count(size_t n, const Rat& a) {
  if (n == 0) throw InvalidParameterError("rank must be positive");
  if (sgn(a) <= 0 || a >= Rat(static_cast<long>(n)))
    throw InvalidParameterError("exponent a must satisfy 0 < a < n");
  // 4^(a*n/(n-a)) = 2^(E/D) with E = 2*num*n and D = den*n - num.
  Int num = a.get_num();
  Int den = a.get_den();
  Int e_int = 2 * num * static_cast<long>(n);
  Int d_int = den * static_cast<long>(n) - num;
  unsigned long e = checked_ulong(e_int, "repetition exponent");
  unsigned long d = checked_ulong(d_int, "repetition root index");
  Int pow2 = pow_int(Int(2), e);
  Int k;
  int exact = mpz_root(k.get_mpz_t(), pow2.get_mpz_t(), d);
  if (exact == 0) k += 1;
  return k;
}

long usvp_level_count(size_t n, const Rat& a) {
  if (n == 0) throw InvalidParameterError("rank must be positive");
  if (sgn(a) <= 0) throw InvalidParameterError("exponent a must be positive");
  Int q;
  Int num = a.get_num();
  Int prod = a.get_den() * static_cast<long>(n);
  mpz_fdiv_q(q.get_mpz_t(), prod.get_mpz_t(), num.get_mpz_t());
  if (!q.fits_slong_p() || q.get_si() > kLevelCap)
    throw CapExceededError("level count exceeds the desk-scale cap");
  return q.get_si();
}

Int usvp_level_prime(const Int& k, long level) {
  if (k < 2) throw InvalidParameterError("repetition count must be at least 2");
  if (level < 0) throw InvalidParameterError("level must be nonnegative");
  Int bound = 2 * pow_int(k, static_cast<unsigned long>(level) + 1);
  Int p = next_prime_above(bound);
  // A prime always exists strictly between bound and 2*bound; if the search
  // ever escaped that interval the primality machinery would be broken.
  if (p >= 2 * bound) throw Error("level prime escaped the doubling interval");
  return p;
}

Rat enforce_exponent_assumption(size_t n, const Rat& gamma, const Rat& a, bool* raised) {
  if (raised != nullptr) *raised = false;
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  if (sgn(a) <= 0) throw InvalidParameterError("exponent a must be positive");
  unsigned long u = checked_ulong(a.get_num(), "exponent numerator");
  Int v_times_n = a.get_den() * static_cast<long>(n);
  unsigned long vn = checked_ulong(v_times_n, "exponent denominator");
  // 2^(u/v) > gamma^n  <=>  2^u > gamma^(v*n)
  if (Rat(pow_int(Int(2), u)) > pow_rat(gamma, vn)) return a;
  Rat gn = pow_rat(gamma, static_cast<unsigned long>(n));
  unsigned long c = 0;
  while (Rat(pow_int(Int(2), c)) < gn) {
    ++c;
    if (c > kExponentBitCap) throw CapExceededError("gamma^n exceeds the exponent cap");
  }
  if (raised != nullptr) *raised = true;
  return Rat(static_cast<unsigned long>(c + 1));
}

long det_cvp_level_count(size_t n, const Int& p, const Rat& gamma) {
  if (n == 0) throw InvalidParameterError("rank must be positive");
  if (p < 2) throw InvalidParameterError("modulus p must be at least 2");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  if (gamma * gamma >= Rat(p))
    throw InvalidParameterError("det_cvp needs gamma^2 < p");
  // ceil((n + log2 n + 2) / (2 log2(p/gamma))):
  // smallest m >= 1 with (p*den)^(2m) >= n * 2^(n+2) * num^(2m).
  Int lhs_base = p * gamma.get_den();
  Int rhs_base = gamma.get_num();
  Int rhs_fixed = Int(static_cast<long>(n)) * pow_int(Int(2), static_cast<unsigned long>(n) + 2);
  for (long m = 1; m <= kLevelCap; ++m) {
    unsigned long e = 2 * static_cast<unsigned long>(m);
    if (pow_int(lhs_base, e) >= rhs_fixed * pow_int(rhs_base, e)) return m;
  }
  throw CapExceededError("level count exceeds the desk-scale cap");
}

long det_svp_level_count(size_t n, const Int& p, const Rat& gamma) {
  if (n == 0) throw InvalidParameterError("rank must be positive");
  if (p < 2) throw InvalidParameterError("modulus p must be at least 2");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  if (pow_rat(gamma, 3) >= Rat(p))
    throw InvalidParameterError("det_svp needs gamma^3 < p");
  // ceil((n + 3) / log2(p/gamma^2)):
  // smallest m >= 1 with (p*den^2)^m >= 2^(n+3) * num^(2m).
  Int lhs_base = p * gamma.get_den() * gamma.get_den();
  Int rhs_base = gamma.get_num();
  Int rhs_fixed = pow_int(Int(2), static_cast<unsigned long>(n) + 3);
  for (long m = 1; m <= kLevelCap; ++m) {
    unsigned long e = static_cast<unsigned long>(m);
    if (pow_int(lhs_base, e) >= rhs_fixed * pow_int(rhs_base, 2 * e)) return m;
  }
  throw CapExceededError("level count exceeds the desk-scale cap");
}

size_t padded_rank(size_t n, const Rat& epsilon, size_t rank_cap) {
  if (n == 0) throw InvalidParameterError("rank must be positive");
  if (sgn(epsilon) <= 0 || epsilon >= 1)
    throw InvalidParameterError("epsilon must lie strictly between 0 and 1");
  unsigned long u = checked_ulong(epsilon.get_num(), "epsilon numerator");
  unsigned long v = checked_ulong(epsilon.get_den(), "epsilon denominator");
  Int target = pow_int(Int(static_cast<long>(n)), v);
  // N = ceil(n^(v/u)): smallest N with N^u >= n^v; N >= n since v > u.
  for (size_t cand = n; cand <= rank_cap; ++cand) {
    if (pow_int(Int(static_cast<long>(cand)), u) >= target) return cand;
  }
  throw CapExceededError("padded rank exceeds the desk-scale rank cap");
}

Rat chain_exponent(size_t n, const Rat& gamma) {
  if (n == 0) throw InvalidParameterError("rank must be positive");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  // a = q/64 with q minimal such that 2^q >= gamma^(128 n) * (n+1)^64.
  Rat rhs = pow_rat(gamma, 128 * static_cast<unsigned long>(n)) *
            Rat(pow_int(Int(static_cast<long>(n) + 1), 64));
  unsigned long q = 0;
  while (Rat(pow_int(Int(2), q)) < rhs) {
    ++q;
    if (q > kExponentBitCap) throw CapExceededError("chain exponent exceeds the cap");
  }
  return make_rat(Int(static_cast<unsigned long>(q)), Int(64));
}

ReductionReport svp_to_usvp(const RatMat& basis, const Rat& gamma, const Rat& a_in,
                            const std::shared_ptr<UsvpOracle>& oracle, uint64_t seed,
                            long long sample_budget) {
  validate_shape(basis);
  if (!oracle) throw InvalidParameterError("a unique-shortest oracle must be provided");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  if (oracle->gamma() != gamma)
    throw InvalidParameterError("oracle factor must match the requested gamma");
  if (sgn(a_in) <= 0) throw InvalidParameterError("exponent a must be positive");
  if (sample_budget < 1) throw InvalidParameterError("sample budget must be positive");
  const size_t n = basis.size();

  ReductionReport report;
  Rat a = a_in;
  const Rat half_n = make_rat(Int(static_cast<long>(n)), Int(2));
  bool clamped = false;
  if (a > half_n) {
    // Larger exponents only weaken the target factor; fold them back.
    a = half_n;
    clamped = true;
  }
  bool raised = false;
  a = enforce_exponent_assumption(n, gamma, a, &raised);
  if (a > half_n)
    throw InvalidParameterError("gamma too large for this rank: 2^a > gamma^n needs a > n/2");
  // Below log2(n+1) the run proceeds but the success guarantee is off.
  unsigned long au = checked_ulong(a.get_num(), "exponent numerator");
  unsigned long av = checked_ulong(a.get_den(), "exponent denominator");
  bool below_range =
      Rat(pow_int(Int(2), au)) < Rat(pow_int(Int(static_cast<long>(n) + 1), av));

  Int k = usvp_repetition_count(n, a);
  long ell = usvp_level_count(n, a);
  Int samples = k * Int(ell + 1);
  if (samples > Int(static_cast<long>(sample_budget)))
    throw CapExceededError("sparsification sample budget exceeded: " + int_str(samples) +
                           " > " + std::to_string(sample_budget));

  std::vector<Int> primes;
  primes.reserve(static_cast<size_t>(ell) + 1);
  for (long i = 0; i <= ell; ++i) primes.push_back(usvp_level_prime(k, i));

  Audited<UsvpOracle> audited = audit_wrap(oracle, n);
  CoeffSolver solver(basis);
  std::optional<LatticePoint> best;
  long long invalid = 0;
  const long long reps = k.get_si();
  for (long long rep = 0; rep < reps; ++rep) {
    for (long i = 0; i <= ell; ++i) {
      SplitMix64 stream(mix64(seed, static_cast<uint64_t>(rep), static_cast<uint64_t>(i)));
      const Int& p = primes[static_cast<size_t>(i)];
      if (!p.fits_ulong_p())
        throw CapExceededError("level prime does not fit a machine word");
      uint64_t p_word = p.get_ui();
      IntVec z(n);
      for (size_t j = 0; j < n; ++j)
        z[j] = Int(static_cast<unsigned long>(uniform_below(stream, p_word)));
      SparsificationSample sample = sparsify(basis, p, z);
      LatticePoint x = audited.oracle->solve(sample.sublattice);
      IntVec coeffs;
      if (is_zero_vec(x.coords) || !solver.integer_coefficients(x.coords, coeffs)) {
        ++invalid;
        continue;
      }
      if (!best || x.norm_sq < best->norm_sq)
        best = LatticePoint{x.coords, coeffs, x.norm_sq};
    }
  }
  if (!best) throw NoValidCandidateError("every oracle answer failed validation");

  LatticePoint opt = svp_exact(basis);
  report.output_point = *best;
  report.achieved_factor_sq = safe_factor(best->norm_sq, opt.norm_sq);
  report.audit = audited.audit;
  put(report.parameters, "reduction", "svp_to_usvp");
  put(report.parameters, "gamma", to_string(gamma));
  put(report.parameters, "a_requested", to_string(a_in));
  put(report.parameters, "a_effective", to_string(a));
  put(report.parameters, "a_clamped", clamped ? "1" : "0");
  put(report.parameters, "a_raised", raised ? "1" : "0");
  put(report.parameters, "a_below_theorem_range", below_range ? "1" : "0");
  put(report.parameters, "k", int_str(k));
  put(report.parameters, "ell", std::to_string(ell));
  {
    std::string list;
    for (size_t i = 0; i < primes.size(); ++i) {
      if (i > 0) list += ",";
      list += int_str(primes[i]);
    }
    put(report.parameters, "primes", list);
  }
  put(report.parameters, "samples", int_str(samples));
  put(report.parameters, "invalid_outputs", std::to_string(invalid));
  put(report.parameters, "seed", std::to_string(seed));
  return report;
}

ReductionReport svp_to_gapsvp(const RatMat& basis, const Rat& gamma, const Rat& a,
                              const OraclePolicy& gapsvp_policy, uint64_t seed,
                              long long sample_budget) {
  /* A NO-leaning gap oracle answers exactly like the honest threshold, so its
   * simulated search leg behaves honestly too.  A YES-leaning or seeded oracle
   * misleads inside the gap, which the search leg renders as arbitrary (but
   * replayable) promise-violation outputs. */
  ViolationPolicy violation = ViolationPolicy::SHORTEST_ANYWAY;
  switch (gapsvp_policy.kind) {
    case PolicyKind::HONEST_THRESHOLD:
    case PolicyKind::ADVERSARIAL_NO: violation = ViolationPolicy::SHORTEST_ANYWAY; break;
    case PolicyKind::ADVERSARIAL_YES:
    case PolicyKind::SEEDED_RANDOM: violation = ViolationPolicy::ARBITRARY_SEEDED; break;
  }
  auto oracle = make_usvp_oracle(gamma, violation, mix64(seed, gapsvp_policy.seed));
  ReductionReport report = svp_to_usvp(basis, gamma, a, oracle, seed, sample_budget);
  put(report.parameters, "reduction", "svp_to_gapsvp");
  put(report.parameters, "lm09_simulated", "1");
  put(report.parameters, "gapsvp_policy", policy_name(gapsvp_policy.kind));
  put(report.parameters, "gapsvp_policy_seed", std::to_string(gapsvp_policy.seed));
  return report;
}

DerivedGapSvpOracle::DerivedGapSvpOracle(std::shared_ptr<GapOracle> gapcvp)
    : inner_(std::move(gapcvp)) {
  if (!inner_) throw InvalidParameterError("an inner oracle must be provided");
  if (inner_->kind() != ProblemKind::GAPCVP)
    throw InvalidParameterError(
        "derived shortest-vector decisions need a closest-vector oracle");
}

bool DerivedGapSvpOracle::decide(const RatMat& basis, const Rat& d_sq) const {
  validate_shape(basis);
  // lambda1(L) = min_j dist(b_j, L_j) where L_j doubles the j-th row: any
  // lattice vector with an odd j-th coefficient witnesses the distance, and
  // a shortest vector has an odd coefficient somewhere.
  for (size_t j = 0; j < basis.size(); ++j) {
    RatMat query = basis;
    query[j] = vec_scale(basis[j], Rat(2));
    if (inner_->decide(DecisionInstance{query, basis[j]}, d_sq)) return true;
  }
  return false;
}

const Rat& DerivedGapSvpOracle::gamma() const { return inner_->gamma(); }

DerivedGapSvpOracle gapsvp_from_gapcvp(const std::shared_ptr<GapOracle>& gapcvp_oracle) {
  return DerivedGapSvpOracle(gapcvp_oracle);
}

ReductionReport cvp_guided(const RatMat& basis, const RatVec& target, long ell,
                           const Rat& gamma, const std::shared_ptr<GapOracle>& gapcvp_oracle,
                           const std::shared_ptr<HsvpOracle>& hsvp_oracle) {
  validate_shape(basis);
  const size_t n = basis.size();
  if (target.size() != basis[0].size())
    throw InvalidParameterError("target dimension must match the ambient dimension");
  if (ell < 1) throw InvalidParameterError("branching depth ell must be at least 1");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  if (!gapcvp_oracle || !hsvp_oracle)
    throw InvalidParameterError("both oracles must be provided");
  if (gapcvp_oracle->kind() != ProblemKind::GAPCVP)
    throw InvalidParameterError("guided search needs a closest-vector decision oracle");
  if (gapcvp_oracle->gamma() != gamma)
    throw InvalidParameterError("oracle factor must match the requested gamma");
  if (hsvp_oracle->factor() < 1)
    throw InvalidParameterError("approximation factor h must be at least 1");

  Audited<GapOracle> gap = audit_wrap(gapcvp_oracle, n);
  Audited<HsvpOracle> hsvp = audit_wrap(hsvp_oracle, n);
  const Rat h = hsvp_oracle->factor();
  long long max_stage_paths = 0;

  // Exact solves for rank-1 leaves and the final comparison share preps.
  std::map<std::string, std::shared_ptr<PreparedLattice>> preps;
  auto prep = [&preps](const RatMat& rows) -> PreparedLattice& {
    std::string key = serialize(rows);
    auto it = preps.find(key);
    if (it == preps.end())
      it = preps.emplace(key, std::make_shared<PreparedLattice>(rows)).first;
    return *it->second;
  };

  std::function<RatVec(const RatMat&, const RatVec&)> solve =
      [&](const RatMat& cur, const RatVec& t_in) -> RatVec {
    const size_t m = cur.size();
    if (m == 1) return prep(cur).closest(t_in).point.coords;
    /* Solving against t - v for a lattice vector v is the same problem, and
     * anchoring v near t keeps every window index and shifted target small;
     * without it the magnitudes compound across stages until exact solves
     * blow past their coefficient caps. The anchor is added back at the end. */
    RatVec anchor = prep(cur).babai(t_in).point.coords;
    RatVec t = vec_sub(t_in, anchor);
    const long s = std::min<long>(ell, static_cast<long>(m) - 1);

    // One frame per depth; every branch at that depth shares it, since the
    // sublattice chain does not depend on the shifted targets.
    struct Stage {
      HyperplaneFrame frame;
      size_t rank;
    };
    std::vector<Stage> stages;
    stages.reserve(static_cast<size_t>(s));
    RatMat chain = cur;
    for (long d = 0; d < s; ++d) {
      RatMat dual = dual_basis(chain);
      LatticePoint w = hsvp.oracle->solve(dual);
      stages.push_back(Stage{hyperplane_frame(chain, w.coords), chain.size()});
      chain = stages.back().frame.sub;
    }
    const RatMat& leaf_basis = chain;

    // Branch: shifted targets only. Generation order is lexicographic in the
    // per-depth indices, so keeping the first strict minimum below realizes
    // the smallest-index tie rule at every level.
    std::vector<RatVec> frontier{t};
    for (long d = 0; d < s; ++d) {
      const Stage& st = stages[static_cast<size_t>(d)];
      const Rat width = h * Rat(static_cast<long>(st.rank));
      std::vector<RatVec> next;
      for (const RatVec& ft : frontier) {
        Rat center = dot(st.frame.dstar, ft);
        Int lo = floor_rat(center - width);
        Int hi = ceil_rat(center + width);
        for (Int i = lo; i <= hi; ++i)
          next.push_back(vec_sub(ft, vec_scale(st.frame.b1, Rat(i))));
      }
      frontier.swap(next);
    }
    max_stage_paths = std::max(max_stage_paths, static_cast<long long>(frontier.size()));

    // Leaves at rank 1 are evaluated exactly (that is the base case of the
    // recursion, not an oracle use); deeper leaves ask the oracle.
    const bool exact_leaf = leaf_basis.size() == 1;
    size_t best_idx = 0;
    Rat best_estimate;
    bool have = false;
    for (size_t idx = 0; idx < frontier.size(); ++idx) {
      Rat estimate = exact_leaf
                         ? prep(leaf_basis).closest(frontier[idx]).dist_sq
                         : estimate_via_decision(*gap.oracle,
                                                 DecisionInstance{leaf_basis, frontier[idx]},
                                                 gamma);
      if (!have || estimate < best_estimate) {
        have = true;
        best_estimate = estimate;
        best_idx = idx;
      }
    }
    RatVec y = solve(leaf_basis, frontier[best_idx]);
    return vec_add(vec_add(y, vec_sub(t, frontier[best_idx])), anchor);
  };

  RatVec point = solve(basis, target);
  CoeffSolver solver(basis);
  ReductionReport report;
  report.output_point = checked_point(solver, point);
  Rat out_dist_sq = norm_sq(vec_sub(target, point));
  Rat opt_dist_sq = prep(basis).closest(target).dist_sq;
  report.achieved_factor_sq = safe_factor(out_dist_sq, opt_dist_sq);
  auto merged = std::make_shared<OracleAudit>();
  merge_audit(*merged, *gap.audit);
  merge_audit(*merged, *hsvp.audit);
  report.audit = merged;
  report.explored_paths = max_stage_paths;
  put(report.parameters, "reduction", "cvp_guided");
  put(report.parameters, "gamma", to_string(gamma));
  put(report.parameters, "ell", std::to_string(ell));
  put(report.parameters, "h", to_string(h));
  put(report.parameters, "explored_paths", std::to_string(max_stage_paths));
  put(report.parameters, "output_dist_sq", to_string(out_dist_sq));
  return report;
}

CvpSubSolver exact_sub_cvp() {
  return [](const RatMat& sub, const RatVec& t) -> LatticePoint {
    if (sub.empty()) return LatticePoint{RatVec(t.size(), Rat(0)), IntVec{}, Rat(0)};
    return cvp_exact(sub, t);
  };
}

CvpSubSolver kannan_sub_cvp(const std::shared_ptr<HsvpOracle>& svp_oracle) {
  if (!svp_oracle) throw InvalidParameterError("a shortest-vector oracle must be provided");
  return [svp_oracle](const RatMat& sub, const RatVec& t) -> LatticePoint {
    if (sub.empty()) return LatticePoint{RatVec(t.size(), Rat(0)), IntVec{}, Rat(0)};
    CoeffSolver solver(sub);
    IntVec coeffs;
    if (solver.integer_coefficients(t, coeffs))
      return LatticePoint{t, coeffs, norm_sq(t)};
    PreparedLattice pl(sub);
    ClosestResult fallback = pl.babai(t);
    Rat height = approx_sqrt(fallback.dist_sq);
    RatMat embedded = kannan_embed(sub, t, height);
    LatticePoint x = svp_oracle->solve(embedded);
    std::optional<RatVec> candidate;
    Rat last = x.coords.back() / height;
    if (last == Rat(1) || last == Rat(-1)) {
      RatVec head(x.coords.begin(), x.coords.end() - 1);
      RatVec recovered = vec_sub(t, vec_scale(head, last));
      IntVec rc;
      if (solver.integer_coefficients(recovered, rc)) candidate = recovered;
    }
    RatVec winner = fallback.point.coords;
    if (candidate &&
        norm_sq(vec_sub(t, *candidate)) <= norm_sq(vec_sub(t, winner)))
      winner = *candidate;
    IntVec wc;
    solver.integer_coefficients(winner, wc);
    return LatticePoint{winner, wc, norm_sq(winner)};
  };
}

ReductionReport cvp_to_svp_wrapper(const RatMat& basis, const RatVec& target,
                                   const std::shared_ptr<HsvpOracle>& svp_oracle,
                                   const CvpSubSolver& inner_cvp) {
  validate_shape(basis);
  const size_t n = basis.size();
  if (target.size() != basis[0].size())
    throw InvalidParameterError("target dimension must match the ambient dimension");
  if (!svp_oracle) throw InvalidParameterError("a shortest-vector oracle must be provided");
  if (!inner_cvp) throw InvalidParameterError("an inner solver must be provided");
  if (svp_oracle->factor() > 2)
    throw InvalidParameterError(
        "the fixed scan window requires an approximation factor of at most 2");

  ReductionReport report;
  put(report.parameters, "reduction", "cvp_to_svp_wrapper");
  put(report.parameters, "h", to_string(svp_oracle->factor()));

  if (n == 1) {
    PreparedLattice pl(basis);
    ClosestResult res = pl.closest(target);
    report.output_point = res.point;
    report.achieved_factor_sq = Rat(1);
    report.audit = std::make_shared<OracleAudit>();
    put(report.parameters, "window", "direct");
    return report;
  }

  Audited<HsvpOracle> audited = audit_wrap(svp_oracle, n);
  RatMat dual = dual_basis(basis);
  LatticePoint w = audited.oracle->solve(dual);
  HyperplaneFrame frame = hyperplane_frame(basis, w.coords);

  /* Scan around the anchored residual, not the raw target: same problem up
   * to a lattice shift, but the window indices and shifted targets stay
   * small enough for the exact inner solves. */
  PreparedLattice pl(basis);
  RatVec anchor = pl.babai(target).point.coords;
  RatVec resid = vec_sub(target, anchor);
  Rat center = dot(frame.dstar, resid);
  Int lo = floor_rat(center) - static_cast<long>(n);
  Int hi = ceil_rat(center) + static_cast<long>(n);
  std::optional<Rat> best_dist;
  RatVec best_point;
  for (Int i = lo; i <= hi; ++i) {
    RatVec shifted = vec_sub(resid, vec_scale(frame.b1, Rat(i)));
    LatticePoint y = inner_cvp(frame.sub, shifted);
    RatVec cand = vec_add(vec_add(y.coords, vec_scale(frame.b1, Rat(i))), anchor);
    Rat dist = norm_sq(vec_sub(target, cand));
    if (!best_dist || dist < *best_dist) {
      best_dist = dist;
      best_point = cand;
    }
  }

  CoeffSolver solver(basis);
  report.output_point = checked_point(solver, best_point);
  report.achieved_factor_sq = safe_factor(*best_dist, pl.closest(target).dist_sq);
  report.audit = audited.audit;
  put(report.parameters, "window_lo", int_str(lo));
  put(report.parameters, "window_hi", int_str(hi));
  put(report.parameters, "output_dist_sq", to_string(*best_dist));
  return report;
}

RatMat kannan_embed(const RatMat& basis, const RatVec& target, const Rat& embedding_height) {
  validate_shape(basis);
  if (target.size() != basis[0].size())
    throw InvalidParameterError("target dimension must match the ambient dimension");
  if (sgn(embedding_height) <= 0)
    throw InvalidParameterError("embedding height must be positive");
  RatMat out;
  out.reserve(basis.size() + 1);
  for (const RatVec& row : basis) {
    RatVec extended = row;
    extended.push_back(Rat(0));
    out.push_back(std::move(extended));
  }
  RatVec last = target;
  last.push_back(embedding_height);
  out.push_back(std::move(last));
  return out;
}

ReductionReport det_cvp(const RatMat& basis, const RatVec& target, const Int& p,
                        const Rat& gamma, const std::shared_ptr<GapOracle>& gapcvp_oracle) {
  validate_shape(basis);
  const size_t n = basis.size();
  if (target.size() != basis[0].size())
    throw InvalidParameterError("target dimension must match the ambient dimension");
  if (p < 2) throw InvalidParameterError("modulus p must be at least 2");
  if (!p.fits_slong_p() || p.get_si() > kResidueCap)
    throw CapExceededError("modulus p exceeds the residue-scan cap");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  if (gamma * gamma >= Rat(p)) throw InvalidParameterError("det_cvp needs gamma^2 < p");
  if (!gapcvp_oracle) throw InvalidParameterError("a decision oracle must be provided");
  if (gapcvp_oracle->kind() != ProblemKind::GAPCVP)
    throw InvalidParameterError("det_cvp needs a closest-vector decision oracle");
  if (gapcvp_oracle->gamma() != gamma)
    throw InvalidParameterError("oracle factor must match the requested gamma");

  Audited<GapOracle> audited = audit_wrap(gapcvp_oracle, n);
  const long p_long = p.get_si();

  std::function<RatVec(const RatMat&, const RatVec&)> solve =
      [&](const RatMat& cur, const RatVec& t) -> RatVec {
    const size_t m = cur.size();
    if (m == 1) {
      PreparedLattice pl(cur);
      return pl.closest(t).point.coords;
    }
    LllResult lll = lll_reduce(cur);
    const RatMat& b = lll.basis;
    GramSchmidt gs = gram_schmidt(b);
    const RatVec& b_last = b[m - 1];
    const long levels = det_cvp_level_count(m, p, gamma);

    RatVec ti = t;
    for (long i = 0; i < levels; ++i) {
      Int scale = pow_int(p, static_cast<unsigned long>(i));
      RatMat sub(b.begin(), b.end() - 1);
      sub.push_back(vec_scale(b_last, Rat(scale * p)));
      std::optional<Rat> best;
      long best_j = 0;
      for (long j = 0; j < p_long; ++j) {
        RatVec tj = vec_sub(ti, vec_scale(b_last, Rat(scale * j)));
        Rat d = estimate_via_decision(*audited.oracle, DecisionInstance{sub, tj}, gamma);
        if (!best || d < *best) {
          best = d;
          best_j = j;
        }
      }
      ti = vec_sub(ti, vec_scale(b_last, Rat(scale * best_j)));
    }

    // Recenter along the last Gram-Schmidt direction so the recursive target
    // stays within covering range of the sublattice.
    Int big = pow_int(p, static_cast<unsigned long>(levels));
    Rat ratio = dot(ti, gs.gs_vectors[m - 1]) / (Rat(big) * gs.gs_sq_norms[m - 1]);
    Int rounded = round_half_even(ratio);
    RatVec tp = vec_sub(ti, vec_scale(b_last, Rat(big * rounded)));
    RatMat next(b.begin(), b.end() - 1);
    RatVec y = solve(next, tp);
    return vec_add(y, vec_sub(t, tp));
  };

  RatVec point = solve(basis, target);
  CoeffSolver solver(basis);
  ReductionReport report;
  report.output_point = checked_point(solver, point);
  Rat out_dist_sq = norm_sq(vec_sub(target, point));
  PreparedLattice pl(basis);
  report.achieved_factor_sq = safe_factor(out_dist_sq, pl.closest(target).dist_sq);
  report.audit = audited.audit;
  put(report.parameters, "reduction", "det_cvp");
  put(report.parameters, "gamma", to_string(gamma));
  put(report.parameters, "p", int_str(p));
  put(report.parameters, "ell", std::to_string(det_cvp_level_count(n, p, gamma)));
  put(report.parameters, "output_dist_sq", to_string(out_dist_sq));
  return report;
}

ReductionReport det_svp(const RatMat& basis, const Int& p, const Rat& gamma,
                        const std::shared_ptr<GapOracle>& gapsvp_oracle) {
  validate_shape(basis);
  const size_t n = basis.size();
  if (!is_prime(p)) throw NotPrimeError("det_svp needs a prime modulus");
  if (!p.fits_slong_p() || p.get_si() > kResidueCap)
    throw CapExceededError("modulus p exceeds the residue-scan cap");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");
  if (pow_rat(gamma, 3) >= Rat(p)) throw InvalidParameterError("det_svp needs gamma^3 < p");
  if (!gapsvp_oracle) throw InvalidParameterError("a decision oracle must be provided");
  if (gapsvp_oracle->kind() != ProblemKind::GAPSVP)
    throw InvalidParameterError("det_svp needs a shortest-vector decision oracle");
  if (gapsvp_oracle->gamma() != gamma)
    throw InvalidParameterError("oracle factor must match the requested gamma");

  Audited<GapOracle> audited = audit_wrap(gapsvp_oracle, n);
  const long p_long = p.get_si();

  std::function<RatVec(const RatMat&)> solve = [&](const RatMat& cur) -> RatVec {
    const size_t m = cur.size();
    if (m == 1) return svp_exact(cur).coords;
    LllResult lll = lll_reduce(cur);
    const RatMat& b = lll.basis;
    const RatVec& second = b[m - 2];
    const RatVec& last = b[m - 1];
    RatMat head(b.begin(), b.end() - 2);
    const long levels = det_svp_level_count(m, p, gamma);

    Int a1(1), a2(0), a3(1);
    for (long i = 0; i < levels; ++i) {
      std::optional<Rat> best;
      long best_j = 0;
      for (long j = 0; j <= p_long; ++j) {
        RatMat rows = head;
        if (j < p_long) {
          rows.push_back(
              vec_add(vec_scale(second, Rat(a1)), vec_scale(last, Rat(a2 + j * a3))));
          rows.push_back(vec_scale(last, Rat(p * a3)));
        } else {
          rows.push_back(
              vec_add(vec_scale(second, Rat(p * a1)), vec_scale(last, Rat(p * a2))));
          rows.push_back(vec_scale(last, Rat(a3)));
        }
        Rat d = estimate_via_decision(*audited.oracle, DecisionInstance{rows, std::nullopt},
                                      gamma);
        if (!best || d < *best) {
          best = d;
          best_j = j;
        }
      }
      if (best_j < p_long) {
        a2 += best_j * a3;
        a3 *= p;
      } else {
        a1 *= p;
        a2 *= p;
      }
    }

    // a1 and a3 are exact powers of p; compare them and drop one of the two
    // trailing directions, keeping a rank m-1 sublattice of the original.
    long k1 = 0, k2 = 0;
    for (Int v = a1; mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t()); v /= p) ++k1;
    for (Int v = a3; mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t()); v /= p) ++k2;
    RatMat next = head;
    if (k1 >= k2) {
      next.push_back(last);
    } else {
      next.push_back(vec_add(vec_scale(second, Rat(a1)), vec_scale(last, Rat(a2))));
    }
    return solve(next);
  };

  RatVec point = solve(basis);
  CoeffSolver solver(basis);
  ReductionReport report;
  report.output_point = checked_point(solver, point);
  if (sgn(report.output_point.norm_sq) == 0)
    throw Error("det_svp produced the zero vector");
  LatticePoint opt = svp_exact(basis);
  report.achieved_factor_sq = safe_factor(report.output_point.norm_sq, opt.norm_sq);
  report.audit = audited.audit;
  put(report.parameters, "reduction", "det_svp");
  put(report.parameters, "gamma", to_string(gamma));
  put(report.parameters, "p", int_str(p));
  put(report.parameters, "ell", std::to_string(det_svp_level_count(n, p, gamma)));
  return report;
}

RatMat pad_usvp(const RatMat& basis, const Rat& epsilon) {
  validate_shape(basis);
  if (is_zero_vec(basis[0]))
    throw InvalidParameterError("the first basis row must be nonzero");
  const size_t n = basis.size();
  const size_t m = basis[0].size();
  const size_t padded = padded_rank(n, epsilon);
  const size_t extra = padded - n;
  const size_t width = m * (extra + 1);

  RatMat out;
  out.reserve(padded);
  for (const RatVec& row : basis) {
    RatVec r(width, Rat(0));
    for (size_t c = 0; c < m; ++c) r[c] = row[c];
    out.push_back(std::move(r));
  }
  // Each padding vector is 3*b_1 in its own fresh coordinate block: pairwise
  // orthogonal, orthogonal to the original span, length exactly 3*|b_1|.
  for (size_t t = 0; t < extra; ++t) {
    RatVec r(width, Rat(0));
    for (size_t c = 0; c < m; ++c) r[m * (t + 1) + c] = Rat(3) * basis[0][c];
    out.push_back(std::move(r));
  }
  return out;
}

ReductionReport cvp_chain_via_usvp(const RatMat& basis, const RatVec& target,
                                   const Rat& gamma, uint64_t seed, bool exact_inner_leg,
                                   long long sample_budget) {
  validate_shape(basis);
  const size_t n = basis.size();
  if (target.size() != basis[0].size())
    throw InvalidParameterError("target dimension must match the ambient dimension");
  if (gamma < 1) throw InvalidParameterError("gamma must be at least 1");

  ReductionReport report;
  put(report.parameters, "reduction", "cvp_chain_via_usvp");
  put(report.parameters, "gamma", to_string(gamma));
  put(report.parameters, "exact_inner_leg", exact_inner_leg ? "1" : "0");
  put(report.parameters, "seed", std::to_string(seed));
  auto merged = std::make_shared<OracleAudit>();

  // Every shortest-vector need of the chain goes through the randomized
  // search (or exact enumeration when the exact flag is set).
  auto svp_leg = [&](const RatMat& lattice, uint64_t tag) -> LatticePoint {
    if (exact_inner_leg) {
      merged->total_calls.fetch_add(1);
      merged->search_calls.fetch_add(1);
      merged->note_dimension(lattice.size());
      return svp_exact(lattice);
    }
    Rat a = chain_exponent(lattice.size(), gamma);
    auto oracle =
        make_usvp_oracle(gamma, ViolationPolicy::SHORTEST_ANYWAY, mix64(seed, tag));
    ReductionReport sub = svp_to_usvp(lattice, gamma, a, oracle,
                                      mix64(seed, tag, 0x1ec5u), sample_budget);
    merge_audit(*merged, *sub.audit);
    return sub.output_point;
  };

  if (n == 1) {
    PreparedLattice pl(basis);
    ClosestResult res = pl.closest(target);
    report.output_point = res.point;
    report.achieved_factor_sq = Rat(1);
    report.audit = merged;
    put(report.parameters, "window", "direct");
    return report;
  }

  put(report.parameters, "a_top", to_string(chain_exponent(n, gamma)));
  RatMat dual = dual_basis(basis);
  LatticePoint w = svp_leg(dual, 1);
  HyperplaneFrame frame = hyperplane_frame(basis, w.coords);

  CoeffSolver sub_solver(frame.sub);
  PreparedLattice sub_prep(frame.sub);

  Rat center = dot(frame.dstar, target);
  Int lo = floor_rat(center) - static_cast<long>(n);
  Int hi = ceil_rat(center) + static_cast<long>(n);
  std::optional<Rat> best_dist;
  RatVec best_point;
  uint64_t leg_tag = 2;
  for (Int i = lo; i <= hi; ++i, ++leg_tag) {
    RatVec shifted = vec_sub(target, vec_scale(frame.b1, Rat(i)));
    RatVec y;
    if (exact_inner_leg) {
      y = exact_sub_cvp()(frame.sub, shifted).coords;
    } else {
      IntVec membership;
      if (sub_solver.integer_coefficients(shifted, membership)) {
        y = shifted;
      } else {
        ClosestResult fallback = sub_prep.babai(shifted);
        Rat height = approx_sqrt(fallback.dist_sq);
        RatMat embedded = kannan_embed(frame.sub, shifted, height);
        LatticePoint x = svp_leg(embedded, leg_tag);
        y = fallback.point.coords;
        Rat last = x.coords.back() / height;
        if (last == Rat(1) || last == Rat(-1)) {
          RatVec head(x.coords.begin(), x.coords.end() - 1);
          RatVec recovered = vec_sub(shifted, vec_scale(head, last));
          IntVec rc;
          if (sub_solver.integer_coefficients(recovered, rc) &&
              norm_sq(vec_sub(shifted, recovered)) <=
                  norm_sq(vec_sub(shifted, y)))
            y = recovered;
        }
      }
    }
    RatVec cand = vec_add(y, vec_scale(frame.b1, Rat(i)));
    Rat dist = norm_sq(vec_sub(target, cand));
    if (!best_dist || dist < *best_dist) {
      best_dist = dist;
      best_point = cand;
    }
  }

  CoeffSolver solver(basis);
  report.output_point = checked_point(solver, best_point);
  PreparedLattice pl(basis);
  report.achieved_factor_sq = safe_factor(*best_dist, pl.closest(target).dist_sq);
  report.audit = merged;
  put(report.parameters, "window_lo", int_str(lo));
  put(report.parameters, "window_hi", int_str(hi));
  put(report.parameters, "output_dist_sq", to_string(*best_dist));
  return report;
}

}  // namespace latlab
