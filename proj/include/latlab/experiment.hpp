#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latlab/instance.hpp"
#include "latlab/oracles.hpp"
#include "latlab/reductions.hpp"

namespace latlab {

/* Everything that determines one experiment: which reduction runs, its
 * parameters, the oracle policy, and the trial schedule. CLI flags mirror
 * these fields one-for-one, so a config is reconstructible from the printed
 * report header. Reduction names use the CLI spelling:
 * svp-usvp | svp-gapsvp | cvp-guided | det-svp | det-cvp | cvp-chain. */
struct RunConfig {
  std::string reduction;
  Rat gamma = Rat(1);
  Rat a = Rat(1);       // randomized searches
  long ell = 1;         // cvp-guided branching depth
  Int p = Int(5);       // det towers
  long h = 1;           // approximate-shortest factor for cvp-guided
  OraclePolicy policy{};
  ViolationPolicy violation = ViolationPolicy::SHORTEST_ANYWAY;  // svp-usvp
  bool hsvp_degraded = false;   // degraded approximate-shortest answers
  bool chain_exact_legs = false;
  uint64_t seed = 0;            // trial i runs with seed + i
  long trials = 1;              // per-instance seeds; stops at first success
  long long sample_budget = 0;  // 0 = library default
};

/* One instance's outcome. Every executed run's report is kept; the theorem
 * bound is factor^2 <= gamma^(2*bound_num/bound_den), checked exactly.
 * cvp-chain asserts no bound (bound_asserted=false): it only measures. */
struct InstanceOutcome {
  std::string id;
  std::vector<ReductionReport> reports;
  std::vector<uint64_t> seeds;  // seed of each executed run
  Rat best_factor_sq = Rat(0);
  unsigned long bound_num = 0, bound_den = 1;
  bool bound_asserted = true;
  bool passed = false;
  std::string error;  // nonempty when the instance failed to run
};

struct ExperimentSummary {
  size_t instances = 0;
  size_t runs = 0;
  size_t passed = 0;
  Rat success_rate = Rat(1);   // passed / instances (1 when empty)
  Rat max_factor_sq = Rat(0);  // worst per-instance answer (best run each)
  long long total_oracle_calls = 0;
  long long max_call_dimension = 0;
  bool all_passed = true;
  std::vector<std::string> errors;
};

struct ExperimentResult {
  RunConfig config;
  std::vector<InstanceOutcome> outcomes;
  ExperimentSummary summary;
};

/* Runs the configured reduction over the corpus, instance by instance in id
 * order, up to `trials` seeds each (stopping at the first run that meets the
 * bound). Per-instance failures are captured in the outcome and summary,
 * never silently dropped; the run continues with the next instance. */
ExperimentResult run_experiment(const RunConfig& config, const std::vector<CorpusEntry>& corpus);

/* Line-oriented key=value rendering: a config header, one "run" block per
 * executed report (parameters, audit counters, bound verdict), then a final
 * "summary" block. Stable ordering, diff-friendly. */
std::string format_experiment(const ExperimentResult& result);

/* Sparsification validation: exact survival probabilities on one instance
 * per row, against the sandwich bounds. Radii are r1 = r2 = lambda_1, so
 * pair_count is the shortest-vector multiplicity. Rows that cannot be
 * computed exactly (z-space beyond the cap, malformed entries) carry their
 * error; other rows are unaffected. */
struct SparsificationRow {
  std::string id;
  Int pair_count = Int(0);         // primitive pairs within r2
  Rat single_probability = Rat(0); // one representative survives, others die
  Rat single_lower = Rat(0), single_upper = Rat(0);  // 1/p - N/p^2, 1/p
  Rat compound_probability = Rat(0);  // lambda_1(L') <= r1 and lambda_2(L') > r2
  Rat compound_lower = Rat(0), compound_upper = Rat(0);  // xi/p(1-xi/p), xi/p
  bool ok = false;
  std::string error;
};

std::vector<SparsificationRow> sparsification_validation(const Int& p,
                                                         const std::vector<CorpusEntry>& corpus);
std::string format_sparsification(const std::vector<SparsificationRow>& rows);

/* Structural validators, one row per (instance, check). Checks run on exact
 * arithmetic; `detail` explains a failure or records the checked quantity. */
struct ValidationRow {
  std::string id;
  std::string check;
  bool ok = false;
  std::string detail;
};

// Point-count bound: |{y : |y| <= r*lambda_1}| <= 2*ceil(2r)^n - 1 at
// r = 1, 3/2, 2.
std::vector<ValidationRow> validate_point_count(const std::vector<CorpusEntry>& corpus);

// Reduced-basis conditions (size reduction + 3/4 exchange), the coordinate
// bound |a_i|^2 <= 2^(3n-2i) |y|^2 / lambda_1^2 over the ball |y| <= 3
// lambda_1, and the dual-of-dual identity.
std::vector<ValidationRow> validate_lll_bounds(const std::vector<CorpusEntry>& corpus);

// Covering bounds on 200 seeded targets per instance: dist^2 <= n 2^(n-2)
// |b~_n|^2 and dist^2 * lambda_1(dual)^2 <= n^2/4.
std::vector<ValidationRow> validate_covering_bounds(const std::vector<CorpusEntry>& corpus);

// Sparsified sublattices: transform determinant +-p (or +-1 for z = 0),
// rows members of the original lattice satisfying the congruence.
std::vector<ValidationRow> validate_sparsify_index(const Int& p,
                                                   const std::vector<CorpusEntry>& corpus);

std::string format_validation(const std::vector<ValidationRow>& rows);
bool all_ok(const std::vector<ValidationRow>& rows);

}  // namespace latlab
