#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "latlab/solvers.hpp"

namespace latlab {

// In-gap behavior of a simulated decision oracle. Outside the gap the answer
// is forced by the problem definition; inside [d, gamma*d) the policy rules.
enum class PolicyKind { HONEST_THRESHOLD, ADVERSARIAL_YES, ADVERSARIAL_NO, SEEDED_RANDOM };

struct OraclePolicy {
  PolicyKind kind = PolicyKind::HONEST_THRESHOLD;
  uint64_t seed = 0;
};

// What a promise-problem oracle returns when the promise fails. Never an
// error: callers must tolerate arbitrary lattice vectors.
enum class ViolationPolicy { SHORTEST_ANYWAY, SECOND_MINIMUM, ARBITRARY_SEEDED };

// Call accounting. total_calls counts logical oracle uses: one per direct
// decision, one per whole estimation, one per search call. decision_probes
// additionally counts every raw threshold probe, including those issued
// inside estimate_via_decision. max_call_dimension tracks the largest rank
// ever passed to the oracle.
struct OracleAudit {
  std::atomic<long long> total_calls{0};
  std::atomic<long long> decision_probes{0};
  std::atomic<long long> estimate_calls{0};
  std::atomic<long long> search_calls{0};
  std::atomic<long long> max_call_dimension{0};

  void note_dimension(size_t rank);
};

// One decision-problem instance. All thresholds are squared lengths.
struct DecisionInstance {
  RatMat basis;
  std::optional<RatVec> target;  // absent: shortest-vector; present: closest-vector
};

enum class ProblemKind { GAPSVP, GAPCVP };

namespace detail {
struct GapCache;
struct SearchCache;
}  // namespace detail

// Simulated gapped decision oracle with approximation factor gamma >= 1.
// Every policy behaves as an exact threshold against an effective squared
// value v_sq in [f_sq / gamma^2, f_sq], where f_sq is the true squared
// answer: decide(d_sq) = (v_sq < d_sq). That makes each policy a valid
// gamma-gap oracle and keeps repeated probes of one instance consistent.
class GapOracle {
 public:
  GapOracle(ProblemKind kind, Rat gamma, OraclePolicy policy);

  // YES iff the effective value is strictly below the squared threshold.
  bool decide(const DecisionInstance& instance, const Rat& d_sq) const;

  // True squared answer f_sq (policy-free). Used by the exact bypass of
  // estimate_via_decision at gamma = 1 and by test replays.
  Rat exact_value_sq(const DecisionInstance& instance) const;

  // Policy-adjusted threshold value backing decide().
  Rat effective_value_sq(const DecisionInstance& instance) const;

  const Rat& gamma() const { return gamma_; }
  ProblemKind kind() const { return kind_; }
  const OraclePolicy& policy() const { return policy_; }

 private:
  friend Rat estimate_via_decision(const GapOracle&, const DecisionInstance&, const Rat&,
                                   const Rat&);
  template <class T>
  friend struct AuditAttach;

  bool probe(const DecisionInstance& instance, const Rat& d_sq) const;
  void check_dimension(size_t rank) const;

  ProblemKind kind_;
  Rat gamma_;
  OraclePolicy policy_;
  std::shared_ptr<detail::GapCache> cache_;
  std::shared_ptr<OracleAudit> audit_;
  size_t limit_dimension_;
};

std::shared_ptr<GapOracle> make_gapsvp_oracle(const Rat& gamma, OraclePolicy policy);
std::shared_ptr<GapOracle> make_gapcvp_oracle(const Rat& gamma, OraclePolicy policy);

// Relative slack of the estimation bisection (squared domain): 2^-20.
Rat default_estimation_slack();

// Search-from-decision bridge: returns d_tilde_sq with
//   f_sq <= d_tilde_sq <= gamma^2 (1 + slack) f_sq,
// using only threshold probes plus reduction data for the brackets. At
// gamma = 1 the exact value is returned directly with zero probes. The
// gamma argument must equal the oracle's factor.
Rat estimate_via_decision(const GapOracle& oracle, const DecisionInstance& instance,
                          const Rat& gamma, const Rat& slack = default_estimation_slack());

// Simulated unique-shortest-vector oracle. When the promise
// lambda_2 >= gamma * lambda_1 holds it returns a vector of length exactly
// lambda_1 (the lexicographically least coefficient vector). On violation it
// returns a nonzero lattice vector chosen by the violation policy.
class UsvpOracle {
 public:
  UsvpOracle(Rat gamma, ViolationPolicy policy, uint64_t seed);

  LatticePoint solve(const RatMat& basis) const;

  const Rat& gamma() const { return gamma_; }
  ViolationPolicy policy() const { return policy_; }

 private:
  template <class T>
  friend struct AuditAttach;

  void check_dimension(size_t rank) const;

  Rat gamma_;
  ViolationPolicy policy_;
  uint64_t seed_;
  std::shared_ptr<detail::SearchCache> cache_;
  std::shared_ptr<OracleAudit> audit_;
  size_t limit_dimension_;
};

std::shared_ptr<UsvpOracle> make_usvp_oracle(const Rat& gamma, ViolationPolicy policy,
                                             uint64_t seed);

// Simulated h-approximate shortest-vector oracle: returns a nonzero lattice
// vector of length at most h * lambda_1. Honest mode returns the exact
// shortest; degraded mode picks a seeded vector from the h-ball to exercise
// callers against worst-case behavior.
class HsvpOracle {
 public:
  HsvpOracle(Rat h, bool degraded, uint64_t seed);

  LatticePoint solve(const RatMat& basis) const;

  const Rat& factor() const { return h_; }
  bool degraded() const { return degraded_; }

 private:
  template <class T>
  friend struct AuditAttach;

  void check_dimension(size_t rank) const;

  Rat h_;
  bool degraded_;
  uint64_t seed_;
  std::shared_ptr<detail::SearchCache> cache_;
  std::shared_ptr<OracleAudit> audit_;
  size_t limit_dimension_;
};

std::shared_ptr<HsvpOracle> make_hsvp_oracle(const Rat& h, bool degraded = false,
                                             uint64_t seed = 0);

// An audited oracle shares the wrapped oracle's caches and seeds but records
// every call in its own audit and enforces the rank ceiling.
template <class Oracle>
struct Audited {
  std::shared_ptr<Oracle> oracle;
  std::shared_ptr<OracleAudit> audit;
};

Audited<GapOracle> audit_wrap(const std::shared_ptr<GapOracle>& oracle, size_t limit_dimension);
Audited<UsvpOracle> audit_wrap(const std::shared_ptr<UsvpOracle>& oracle, size_t limit_dimension);
Audited<HsvpOracle> audit_wrap(const std::shared_ptr<HsvpOracle>& oracle, size_t limit_dimension);

}  // namespace latlab
