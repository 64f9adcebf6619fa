#include "latlab/oracles.hpp"

#include <algorithm>

#include "latlab/error.hpp"
#include "latlab/prng.hpp"

namespace latlab {

void OracleAudit::note_dimension(size_t rank) {
  long long r = static_cast<long long>(rank);
  long long cur = max_call_dimension.load();
  while (cur < r && !max_call_dimension.compare_exchange_weak(cur, r)) {
  }
}

namespace detail {

// Reductions visit thousands of distinct sublattices through one oracle, so
// the memo maps are flushed once they grow past a fixed size. Every entry is
// a pure function of its key (seeded draws are content-keyed), so eviction
// never changes an answer.
constexpr size_t kPrepCacheCap = 1024;
constexpr size_t kValueCacheCap = 8192;

struct GapCache {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<PreparedLattice>> preps;
  std::map<std::string, Rat> true_values;
  std::map<std::string, Rat> effective_values;
};

struct SearchCache {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<PreparedLattice>> preps;
  std::atomic<uint64_t> call_counter{0};
};

std::shared_ptr<PreparedLattice> prepare(std::map<std::string, std::shared_ptr<PreparedLattice>>& preps,
                                         const RatMat& basis, const std::string& key) {
  auto it = preps.find(key);
  if (it != preps.end()) return it->second;
  if (preps.size() >= kPrepCacheCap) preps.clear();
  auto prep = std::make_shared<PreparedLattice>(basis);
  preps.emplace(key, prep);
  return prep;
}

}  // namespace detail

namespace {

std::string instance_key(const DecisionInstance& inst) {
  std::string k = serialize(inst.basis);
  if (inst.target) {
    k += "#t:";
    k += serialize(RatMat{*inst.target});
  }
  return k;
}

// Effective threshold value for a policy: a deterministic point in
// [f_sq / gamma^2, f_sq]. SEEDED_RANDOM keys the draw on the instance
// content so repeated probes of the same instance stay consistent.
Rat effective_from_true(const Rat& f_sq, const Rat& gamma, const OraclePolicy& policy,
                        const DecisionInstance& inst) {
  Rat gamma_sq = gamma * gamma;
  switch (policy.kind) {
    case PolicyKind::HONEST_THRESHOLD:
    case PolicyKind::ADVERSARIAL_NO:
      // Answering NO whenever allowed is exactly the honest threshold at
      // f_sq: NO is allowed precisely when the true value is >= d.
      return f_sq;
    case PolicyKind::ADVERSARIAL_YES:
      return f_sq / gamma_sq;
    case PolicyKind::SEEDED_RANDOM: {
      uint64_t h = content_hash(inst.basis);
      if (inst.target) h = mix64(h, content_hash_vec(*inst.target, 0x7a6c5e4d3b2a1908ull));
      uint64_t draw = mix64(policy.seed, h);
      // u in [0, 1) with 64-bit resolution; v_sq = f_sq ((1-u) + u / gamma^2).
      Rat u = make_rat(Int(static_cast<unsigned long>(draw)), pow_int(Int(2), 64));
      return f_sq * ((Rat(1) - u) + u / gamma_sq);
    }
  }
  throw InvalidParameterError("unknown policy kind");
}

}  // namespace

GapOracle::GapOracle(ProblemKind kind, Rat gamma, OraclePolicy policy)
    : kind_(kind), gamma_(std::move(gamma)), policy_(policy),
      cache_(std::make_shared<detail::GapCache>()), limit_dimension_(SIZE_MAX) {
  if (gamma_ < 1) throw InvalidParameterError("GapOracle: gamma must be >= 1");
}

void GapOracle::check_dimension(size_t rank) const {
  if (rank > limit_dimension_)
    throw DimensionViolationError("oracle call above the audited dimension limit");
  if (audit_) audit_->note_dimension(rank);
}

Rat GapOracle::exact_value_sq(const DecisionInstance& instance) const {
  if ((kind_ == ProblemKind::GAPCVP) != instance.target.has_value())
    throw InvalidParameterError("GapOracle: instance kind mismatch");
  std::string key = instance_key(instance);
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->true_values.find(key);
  if (it != cache_->true_values.end()) return it->second;
  auto prep = detail::prepare(cache_->preps, instance.basis, serialize(instance.basis));
  Rat f_sq = instance.target ? prep->closest(*instance.target).dist_sq : prep->shortest().norm_sq;
  if (cache_->true_values.size() >= detail::kValueCacheCap) cache_->true_values.clear();
  cache_->true_values.emplace(key, f_sq);
  return f_sq;
}

Rat GapOracle::effective_value_sq(const DecisionInstance& instance) const {
  std::string key = instance_key(instance);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->effective_values.find(key);
    if (it != cache_->effective_values.end()) return it->second;
  }
  Rat f_sq = exact_value_sq(instance);
  Rat v_sq = effective_from_true(f_sq, gamma_, policy_, instance);
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (cache_->effective_values.size() >= detail::kValueCacheCap) cache_->effective_values.clear();
  cache_->effective_values.emplace(key, v_sq);
  return v_sq;
}

bool GapOracle::probe(const DecisionInstance& instance, const Rat& d_sq) const {
  if (sgn(d_sq) <= 0) throw InvalidParameterError("GapOracle: threshold must be positive");
  check_dimension(instance.basis.size());
  if (audit_) audit_->decision_probes.fetch_add(1);
  return effective_value_sq(instance) < d_sq;
}

bool GapOracle::decide(const DecisionInstance& instance, const Rat& d_sq) const {
  if (audit_) audit_->total_calls.fetch_add(1);
  return probe(instance, d_sq);
}

std::shared_ptr<GapOracle> make_gapsvp_oracle(const Rat& gamma, OraclePolicy policy) {
  return std::make_shared<GapOracle>(ProblemKind::GAPSVP, gamma, policy);
}

std::shared_ptr<GapOracle> make_gapcvp_oracle(const Rat& gamma, OraclePolicy policy) {
  return std::make_shared<GapOracle>(ProblemKind::GAPCVP, gamma, policy);
}

Rat default_estimation_slack() { return make_rat(Int(1), pow_int(Int(2), 20)); }

Rat estimate_via_decision(const GapOracle& oracle, const DecisionInstance& instance,
                          const Rat& gamma, const Rat& slack) {
  if (gamma != oracle.gamma())
    throw InvalidParameterError("estimate_via_decision: gamma does not match the oracle");
  if ((oracle.kind() == ProblemKind::GAPCVP) != instance.target.has_value())
    throw InvalidParameterError("estimate_via_decision: instance kind mismatch");
  if (sgn(slack) <= 0) throw InvalidParameterError("estimate_via_decision: slack must be positive");
  if (oracle.audit_) {
    oracle.audit_->total_calls.fetch_add(1);
    oracle.audit_->estimate_calls.fetch_add(1);
  }
  oracle.check_dimension(instance.basis.size());

  // Exact bypass: a 1-gap oracle is the exact decision problem, and binary
  // search cannot pin an arbitrary rational exactly in finite probes.
  if (gamma == 1) return oracle.exact_value_sq(instance);

  Rat gamma_sq = gamma * gamma;
  LllResult lll = lll_reduce(instance.basis);
  GramSchmidt gs = gram_schmidt(lll.basis);

  Rat lo_sq, hi_sq;
  if (!instance.target) {
    // lambda_1 >= min |b~_i| and lambda_1 <= |b_1|, both exact from LLL data.
    Rat min_gs = gs.gs_sq_norms[0];
    for (const Rat& q : gs.gs_sq_norms) min_gs = std::min(min_gs, q);
    lo_sq = min_gs / gamma_sq;
    hi_sq = norm_sq(lll.basis[0]);
  } else {
    CoeffSolver solver(instance.basis);
    IntVec ignored;
    if (solver.integer_coefficients(*instance.target, ignored)) return Rat(0);
    PreparedLattice prep(lll.basis);
    Rat babai_sq = prep.babai(*instance.target).dist_sq;
    // Positive distance lower bound: the off-span residual, or a dual-pairing
    // bound dist >= dist(<d_i, t>, Z) / |d_i| for a non-integral pairing.
    Projection proj = project_onto_span(instance.basis, *instance.target);
    Rat bound_sq = proj.residual_sq;
    RatMat dual = dual_basis(instance.basis);
    for (size_t i = 0; i < dual.size(); ++i) {
      Rat pairing = dot(dual[i], *instance.target);
      Rat frac = pairing - Rat(round_half_even(pairing));
      if (sgn(frac) == 0) continue;
      Rat cand = frac * frac / norm_sq(dual[i]);
      bound_sq = std::max(bound_sq, cand);
    }
    if (sgn(bound_sq) <= 0)
      throw BracketError("estimate_via_decision: no positive distance bound");
    lo_sq = bound_sq / gamma_sq;
    hi_sq = babai_sq;
  }
  if (sgn(lo_sq) <= 0 || hi_sq <= lo_sq)
    throw BracketError("estimate_via_decision: invalid bracket");

  // Invariant: lo_sq <= v_sq <= hi_sq for the oracle's effective value.
  Rat one_plus = Rat(1) + slack;
  while (hi_sq > lo_sq * one_plus) {
    Rat mid = (lo_sq + hi_sq) / 2;
    if (oracle.probe(instance, mid))
      hi_sq = mid;
    else
      lo_sq = mid;
  }
  return gamma_sq * hi_sq;
}

namespace {

// Canonical candidate listing for seeded picks: one representative per
// {x, -x} pair (the one whose first nonzero ambient coordinate is positive),
// ordered by squared length then ambient lexicographic order. The listing
// depends only on the lattice and the radius, not on the supplied basis.
std::vector<LatticePoint> canonical_candidates(const std::vector<LatticePoint>& ball) {
  std::vector<LatticePoint> reps;
  for (const LatticePoint& p : ball) {
    bool positive = false;
    for (const Rat& x : p.coords) {
      int s = sgn(x);
      if (s != 0) {
        positive = s > 0;
        break;
      }
    }
    if (positive) reps.push_back(p);
  }
  std::sort(reps.begin(), reps.end(), [](const LatticePoint& a, const LatticePoint& b) {
    int c = cmp(a.norm_sq, b.norm_sq);
    if (c != 0) return c < 0;
    return lex_less_rat(a.coords, b.coords);
  });
  return reps;
}

LatticePoint negate_point(const LatticePoint& p) {
  LatticePoint q;
  q.coords.reserve(p.coords.size());
  for (const Rat& x : p.coords) q.coords.push_back(-x);
  q.coeffs = vec_neg(p.coeffs);
  q.norm_sq = p.norm_sq;
  return q;
}

LatticePoint seeded_pick(const std::vector<LatticePoint>& reps, uint64_t seed, uint64_t counter) {
  SplitMix64 stream(mix64(seed, counter));
  size_t idx = static_cast<size_t>(uniform_below(stream, reps.size()));
  bool negate = (stream.next() & 1) != 0;
  return negate ? negate_point(reps[idx]) : reps[idx];
}

}  // namespace

UsvpOracle::UsvpOracle(Rat gamma, ViolationPolicy policy, uint64_t seed)
    : gamma_(std::move(gamma)), policy_(policy), seed_(seed),
      cache_(std::make_shared<detail::SearchCache>()), limit_dimension_(SIZE_MAX) {
  if (gamma_ < 1) throw InvalidParameterError("UsvpOracle: gamma must be >= 1");
}

void UsvpOracle::check_dimension(size_t rank) const {
  if (rank > limit_dimension_)
    throw DimensionViolationError("oracle call above the audited dimension limit");
  if (audit_) audit_->note_dimension(rank);
}

LatticePoint UsvpOracle::solve(const RatMat& basis) const {
  check_dimension(basis.size());
  if (audit_) {
    audit_->total_calls.fetch_add(1);
    audit_->search_calls.fetch_add(1);
  }
  uint64_t counter = cache_->call_counter.fetch_add(1);
  std::shared_ptr<PreparedLattice> prep;
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    prep = detail::prepare(cache_->preps, basis, serialize(basis));
  }
  LatticePoint champion = prep->shortest();
  Rat ball_radius_sq = gamma_ * gamma_ * champion.norm_sq;
  // The promise lambda_2 >= gamma lambda_1 fails iff some vector independent
  // of the champion is STRICTLY inside the gamma-ball. Only this ball is ever
  // enumerated; the true lambda_2 of a violated instance can be huge and is
  // never needed.
  std::vector<LatticePoint> ball = prep->points_in_ball(ball_radius_sq, false);
  const LatticePoint* second = nullptr;
  for (const LatticePoint& p : ball) {
    if (p.norm_sq >= ball_radius_sq) break;  // sorted by norm
    if (parallel(p.coeffs, champion.coeffs)) continue;
    second = &p;
    break;
  }
  if (second == nullptr) return champion;  // promise holds
  switch (policy_) {
    case ViolationPolicy::SHORTEST_ANYWAY:
      return champion;
    case ViolationPolicy::SECOND_MINIMUM:
      return *second;
    case ViolationPolicy::ARBITRARY_SEEDED:
      return seeded_pick(canonical_candidates(ball), seed_, counter);
  }
  throw InvalidParameterError("unknown violation policy");
}

std::shared_ptr<UsvpOracle> make_usvp_oracle(const Rat& gamma, ViolationPolicy policy,
                                             uint64_t seed) {
  return std::make_shared<UsvpOracle>(gamma, policy, seed);
}

HsvpOracle::HsvpOracle(Rat h, bool degraded, uint64_t seed)
    : h_(std::move(h)), degraded_(degraded), seed_(seed),
      cache_(std::make_shared<detail::SearchCache>()), limit_dimension_(SIZE_MAX) {
  if (h_ < 1) throw InvalidParameterError("HsvpOracle: factor must be >= 1");
}

void HsvpOracle::check_dimension(size_t rank) const {
  if (rank > limit_dimension_)
    throw DimensionViolationError("oracle call above the audited dimension limit");
  if (audit_) audit_->note_dimension(rank);
}

LatticePoint HsvpOracle::solve(const RatMat& basis) const {
  check_dimension(basis.size());
  if (audit_) {
    audit_->total_calls.fetch_add(1);
    audit_->search_calls.fetch_add(1);
  }
  uint64_t counter = cache_->call_counter.fetch_add(1);
  std::shared_ptr<PreparedLattice> prep;
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    prep = detail::prepare(cache_->preps, basis, serialize(basis));
  }
  LatticePoint champion = prep->shortest();
  if (!degraded_) return champion;
  Rat radius_sq = h_ * h_ * champion.norm_sq;
  std::vector<LatticePoint> ball = prep->points_in_ball(radius_sq, false);
  return seeded_pick(canonical_candidates(ball), seed_, counter);
}

std::shared_ptr<HsvpOracle> make_hsvp_oracle(const Rat& h, bool degraded, uint64_t seed) {
  return std::make_shared<HsvpOracle>(h, degraded, seed);
}

namespace {

template <class Oracle>
Audited<Oracle> wrap_with_audit(const std::shared_ptr<Oracle>& oracle) {
  Audited<Oracle> out;
  out.audit = std::make_shared<OracleAudit>();
  out.oracle = std::make_shared<Oracle>(*oracle);
  return out;
}

}  // namespace

// Attach helper with access to the private audit fields.
template <class Oracle>
struct AuditAttach {
  static void attach(Oracle& oracle, std::shared_ptr<OracleAudit> audit, size_t limit) {
    oracle.audit_ = std::move(audit);
    oracle.limit_dimension_ = limit;
  }
};

Audited<GapOracle> audit_wrap(const std::shared_ptr<GapOracle>& oracle, size_t limit_dimension) {
  Audited<GapOracle> out = wrap_with_audit(oracle);
  AuditAttach<GapOracle>::attach(*out.oracle, out.audit, limit_dimension);
  return out;
}

Audited<UsvpOracle> audit_wrap(const std::shared_ptr<UsvpOracle>& oracle, size_t limit_dimension) {
  Audited<UsvpOracle> out = wrap_with_audit(oracle);
  AuditAttach<UsvpOracle>::attach(*out.oracle, out.audit, limit_dimension);
  return out;
}

Audited<HsvpOracle> audit_wrap(const std::shared_ptr<HsvpOracle>& oracle, size_t limit_dimension) {
  Audited<HsvpOracle> out = wrap_with_audit(oracle);
  AuditAttach<HsvpOracle>::attach(*out.oracle, out.audit, limit_dimension);
  return out;
}

}  // namespace latlab
