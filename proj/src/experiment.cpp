#include "latlab/experiment.hpp"

#include <algorithm>
#include <sstream>

#include "latlab/error.hpp"
#include "latlab/lattice_core.hpp"
#include "latlab/prng.hpp"
#include "latlab/solvers.hpp"
#include "latlab/sparsify.hpp"

namespace latlab {

namespace {

std::string int_str(const Int& x) { return x.get_str(); }

bool needs_target(const std::string& reduction) {
  return reduction == "cvp-guided" || reduction == "det-cvp" || reduction == "cvp-chain";
}

/* Executes one run of the configured reduction at the given seed. */
ReductionReport run_once(const RunConfig& cfg, const RatMat& basis, const RatVec* target,
                         uint64_t seed) {
  long long budget = cfg.sample_budget > 0 ? cfg.sample_budget : default_sample_budget();
  if (cfg.reduction == "svp-usvp") {
    auto oracle = make_usvp_oracle(cfg.gamma, cfg.violation, mix64(seed, 0xa11ceull));
    return svp_to_usvp(basis, cfg.gamma, cfg.a, oracle, seed, budget);
  }
  if (cfg.reduction == "svp-gapsvp")
    return svp_to_gapsvp(basis, cfg.gamma, cfg.a, cfg.policy, seed, budget);
  if (cfg.reduction == "cvp-guided") {
    auto gap = make_gapcvp_oracle(cfg.gamma, cfg.policy);
    auto hsvp = make_hsvp_oracle(Rat(Int(cfg.h)), cfg.hsvp_degraded, mix64(seed, 0x457ull));
    return cvp_guided(basis, *target, cfg.ell, cfg.gamma, gap, hsvp);
  }
  if (cfg.reduction == "det-svp") {
    auto gap = make_gapsvp_oracle(cfg.gamma, cfg.policy);
    return det_svp(basis, cfg.p, cfg.gamma, gap);
  }
  if (cfg.reduction == "det-cvp") {
    auto gap = make_gapcvp_oracle(cfg.gamma, cfg.policy);
    return det_cvp(basis, *target, cfg.p, cfg.gamma, gap);
  }
  if (cfg.reduction == "cvp-chain")
    return cvp_chain_via_usvp(basis, *target, cfg.gamma, seed, cfg.chain_exact_legs, budget);
  throw InvalidParameterError("unknown reduction: " + cfg.reduction);
}

/* The theorem bound for this run, as the exponent num/den of gamma in
 * factor <= gamma^(num/den). Randomized searches read back the normalized
 * exponent the run actually used; det towers read back the top-level level
 * count. Returns false when the reduction asserts no bound. */
bool bound_exponent(const RunConfig& cfg, const ReductionReport& report, size_t n,
                    unsigned long* num, unsigned long* den) {
  if (cfg.reduction == "svp-usvp" || cfg.reduction == "svp-gapsvp") {
    Rat a_eff = parse_rat(report.parameters.at("a_effective"));
    *num = static_cast<unsigned long>(n) * Int(a_eff.get_den()).get_ui();
    *den = Int(a_eff.get_num()).get_ui();
    return true;
  }
  if (cfg.reduction == "cvp-guided") {
    *num = static_cast<unsigned long>(n);
    *den = static_cast<unsigned long>(cfg.ell);
    return true;
  }
  if (cfg.reduction == "det-svp" || cfg.reduction == "det-cvp") {
    long levels = std::stol(report.parameters.at("ell"));
    *num = static_cast<unsigned long>(levels) * static_cast<unsigned long>(n);
    *den = 1;
    return true;
  }
  return false;  // cvp-chain: measured only
}

std::string policy_label(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::HONEST_THRESHOLD: return "honest-threshold";
    case PolicyKind::ADVERSARIAL_YES: return "adversarial-yes";
    case PolicyKind::ADVERSARIAL_NO: return "adversarial-no";
    case PolicyKind::SEEDED_RANDOM: return "seeded-random";
  }
  return "?";
}

std::string violation_label(ViolationPolicy v) {
  switch (v) {
    case ViolationPolicy::SHORTEST_ANYWAY: return "shortest-anyway";
    case ViolationPolicy::SECOND_MINIMUM: return "second-minimum";
    case ViolationPolicy::ARBITRARY_SEEDED: return "arbitrary-seeded";
  }
  return "?";
}

void render_config(std::ostringstream& os, const RunConfig& cfg) {
  os << "experiment reduction=" << cfg.reduction << " gamma=" << to_string(cfg.gamma);
  if (cfg.reduction == "svp-usvp" || cfg.reduction == "svp-gapsvp")
    os << " a=" << to_string(cfg.a);
  if (cfg.reduction == "cvp-guided") os << " ell=" << cfg.ell << " h=" << cfg.h;
  if (cfg.reduction == "det-svp" || cfg.reduction == "det-cvp") os << " p=" << int_str(cfg.p);
  if (cfg.reduction == "svp-usvp")
    os << " violation=" << violation_label(cfg.violation);
  else if (cfg.reduction != "cvp-chain")
    os << " policy=" << policy_label(cfg.policy.kind) << " policy_seed=" << cfg.policy.seed;
  os << " seed=" << cfg.seed << " trials=" << cfg.trials << "\n";
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config, const std::vector<CorpusEntry>& corpus) {
  if (config.trials < 1) throw InvalidParameterError("trials must be at least 1");
  ExperimentResult result;
  result.config = config;
  std::vector<const CorpusEntry*> ordered;
  for (const auto& e : corpus) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(),
            [](const CorpusEntry* x, const CorpusEntry* y) { return x->id < y->id; });

  ExperimentSummary& sum = result.summary;
  for (const CorpusEntry* entry : ordered) {
    InstanceOutcome out;
    out.id = entry->id;
    ++sum.instances;
    try {
      const RatMat& basis = entry->instance.basis;
      const RatVec* target = nullptr;
      if (needs_target(config.reduction)) {
        if (!entry->instance.target)
          throw InvalidParameterError("instance has no target row");
        target = &*entry->instance.target;
      }
      for (long t = 0; t < config.trials && !out.passed; ++t) {
        uint64_t seed = config.seed + static_cast<uint64_t>(t);
        ReductionReport report = run_once(config, basis, target, seed);
        unsigned long num = 0, den = 1;
        out.bound_asserted = bound_exponent(config, report, basis.size(), &num, &den);
        out.bound_num = num;
        out.bound_den = den;
        bool within = !out.bound_asserted ||
                      le_scaled_pow(report.achieved_factor_sq, config.gamma, num, den, Rat(1));
        if (out.reports.empty() || report.achieved_factor_sq < out.best_factor_sq)
          out.best_factor_sq = report.achieved_factor_sq;
        sum.total_oracle_calls += report.audit->total_calls.load();
        sum.max_call_dimension =
            std::max(sum.max_call_dimension, report.audit->max_call_dimension.load());
        ++sum.runs;
        out.seeds.push_back(seed);
        out.reports.push_back(std::move(report));
        if (within) out.passed = true;
      }
    } catch (const Error& e) {
      out.error = e.what();
      out.passed = false;
      sum.errors.push_back(out.id + ": " + out.error);
    }
    /* The experiment's answer for one instance is its best run (amplified
     * schedules stop at the first success), so the summary's factor is the
     * worst answer, not the worst intermediate trial. */
    if (!out.reports.empty() && out.best_factor_sq > sum.max_factor_sq)
      sum.max_factor_sq = out.best_factor_sq;
    if (out.passed) ++sum.passed;
    result.outcomes.push_back(std::move(out));
  }
  sum.all_passed = (sum.passed == sum.instances) && sum.errors.empty();
  sum.success_rate =
      sum.instances ? make_rat(Int(static_cast<long>(sum.passed)),
                               Int(static_cast<long>(sum.instances)))
                    : Rat(1);
  return result;
}

std::string format_experiment(const ExperimentResult& result) {
  std::ostringstream os;
  render_config(os, result.config);
  for (const auto& out : result.outcomes) {
    for (size_t i = 0; i < out.reports.size(); ++i) {
      const ReductionReport& r = out.reports[i];
      os << "\nrun instance=" << out.id << " run_seed=" << out.seeds[i] << "\n";
      for (const auto& [k, v] : r.parameters) os << k << "=" << v << "\n";
      os << "achieved_factor_sq=" << to_string(r.achieved_factor_sq) << "\n";
      if (r.explored_paths > 0) os << "explored_paths=" << r.explored_paths << "\n";
      os << "audit_total_calls=" << r.audit->total_calls.load() << "\n";
      os << "audit_decision_probes=" << r.audit->decision_probes.load() << "\n";
      os << "audit_max_dimension=" << r.audit->max_call_dimension.load() << "\n";
      if (out.bound_asserted)
        os << "bound_exponent=" << out.bound_num << "/" << out.bound_den << "\n";
      else
        os << "bound_exponent=none\n";
    }
    if (!out.error.empty())
      os << "\nrun instance=" << out.id << "\nerror=" << out.error << "\n";
    os << "instance=" << out.id << " passed=" << (out.passed ? 1 : 0) << "\n";
  }
  const ExperimentSummary& s = result.summary;
  os << "\nsummary\n";
  os << "instances=" << s.instances << "\n";
  os << "runs=" << s.runs << "\n";
  os << "passed=" << s.passed << "\n";
  os << "success_rate=" << to_string(s.success_rate) << "\n";
  os << "max_factor_sq=" << to_string(s.max_factor_sq) << "\n";
  os << "total_oracle_calls=" << s.total_oracle_calls << "\n";
  os << "max_call_dimension=" << s.max_call_dimension << "\n";
  for (const auto& e : s.errors) os << "error=" << e << "\n";
  os << "all_passed=" << (s.all_passed ? 1 : 0) << "\n";
  return os.str();
}

std::vector<SparsificationRow> sparsification_validation(const Int& p,
                                                         const std::vector<CorpusEntry>& corpus) {
  std::vector<SparsificationRow> rows;
  Rat rp(p);
  for (const auto& entry : corpus) {
    SparsificationRow row;
    row.id = entry.id;
    try {
      const RatMat& basis = entry.instance.basis;
      Rat l1_sq = svp_exact(basis).norm_sq;
      row.pair_count = count_primitive(basis, l1_sq).count;
      Rat xi(row.pair_count);
      row.single_probability = exact_single_vector_probability(basis, p, l1_sq, 0);
      row.single_lower = Rat(1) / rp - xi / (rp * rp);
      row.single_upper = Rat(1) / rp;
      row.compound_probability = exact_sparsification_probability(basis, p, l1_sq, l1_sq);
      row.compound_lower = xi / rp * (Rat(1) - xi / rp);
      row.compound_upper = xi / rp;
      row.ok = row.single_probability >= row.single_lower &&
               row.single_probability <= row.single_upper &&
               row.compound_probability >= row.compound_lower &&
               row.compound_probability <= row.compound_upper;
      if (!row.ok) row.error = "probability outside the sandwich";
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_sparsification(const std::vector<SparsificationRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << "instance=" << r.id;
    if (r.error.empty() || r.error == "probability outside the sandwich") {
      os << " pairs=" << int_str(r.pair_count)
         << " single=" << to_string(r.single_probability)
         << " single_bounds=[" << to_string(r.single_lower) << "," << to_string(r.single_upper)
         << "]"
         << " compound=" << to_string(r.compound_probability)
         << " compound_bounds=[" << to_string(r.compound_lower) << ","
         << to_string(r.compound_upper) << "]";
    }
    os << " pass=" << (r.ok ? 1 : 0);
    if (!r.error.empty()) os << " error=" << r.error;
    os << "\n";
  }
  return os.str();
}

namespace {

void push_row(std::vector<ValidationRow>& rows, const std::string& id, const std::string& check,
              bool ok, const std::string& detail) {
  rows.push_back(ValidationRow{id, check, ok, detail});
}

/* Wraps one per-instance validator body so an exception becomes a failing
 * row instead of aborting the whole table. */
template <typename Fn>
void guarded(std::vector<ValidationRow>& rows, const std::string& id, const std::string& check,
             Fn&& body) {
  try {
    body();
  } catch (const Error& e) {
    push_row(rows, id, check, false, e.what());
  }
}

}  // namespace

std::vector<ValidationRow> validate_point_count(const std::vector<CorpusEntry>& corpus) {
  std::vector<ValidationRow> rows;
  const std::vector<Rat> multipliers = {Rat(1), make_rat(Int(3), Int(2)), Rat(2)};
  for (const auto& entry : corpus) {
    guarded(rows, entry.id, "point-count", [&] {
      for (const Rat& r : multipliers) {
        bool ok = verify_point_count_bound(entry.instance.basis, r);
        push_row(rows, entry.id, "point-count", ok, "r=" + to_string(r));
        if (!ok) return;
      }
    });
  }
  return rows;
}

std::vector<ValidationRow> validate_lll_bounds(const std::vector<CorpusEntry>& corpus) {
  std::vector<ValidationRow> rows;
  for (const auto& entry : corpus) {
    guarded(rows, entry.id, "lll-bounds", [&] {
      const RatMat& basis = entry.instance.basis;
      size_t n = basis.size();
      LllResult lll = lll_reduce(basis);
      push_row(rows, entry.id, "lll-conditions", is_lll_reduced(lll.basis), "");

      RatMat dd = dual_basis(dual_basis(basis));
      push_row(rows, entry.id, "dual-of-dual", dd == basis, "");

      /* Coordinate bound over the 3*lambda_1 ball of the reduced basis:
       * a_i^2 * lambda_1^2 <= 2^(3n-2i) * |y|^2, i counted from 1. */
      PreparedLattice prep(lll.basis);
      Rat l1_sq = prep.shortest().norm_sq;
      auto points = prep.points_in_ball(Rat(9) * l1_sq, false);
      bool ok = true;
      std::string detail = "points=" + std::to_string(points.size());
      for (const auto& y : points) {
        for (size_t i = 0; i < n && ok; ++i) {
          Rat lhs = Rat(y.coeffs[i]) * Rat(y.coeffs[i]) * l1_sq;
          Rat rhs = pow_rat(Rat(2), 3 * static_cast<long>(n) - 2 * static_cast<long>(i + 1)) *
                    y.norm_sq;
          if (lhs > rhs) {
            ok = false;
            detail = "coefficient " + Int(y.coeffs[i]).get_str() + " at index " +
                     std::to_string(i + 1) + " breaks the bound";
          }
        }
        if (!ok) break;
      }
      push_row(rows, entry.id, "coordinate-bound", ok, detail);
    });
  }
  return rows;
}

std::vector<ValidationRow> validate_covering_bounds(const std::vector<CorpusEntry>& corpus) {
  std::vector<ValidationRow> rows;
  constexpr int kTargets = 200;
  constexpr long kGrid = 4096;  // targets on a 1/4096 coefficient grid
  for (const auto& entry : corpus) {
    guarded(rows, entry.id, "covering-bounds", [&] {
      const RatMat& basis = entry.instance.basis;
      size_t n = basis.size();
      LllResult lll = lll_reduce(basis);
      GramSchmidt gs = gram_schmidt(lll.basis);
      Rat gs_last_sq = gs.gs_sq_norms[n - 1];
      Rat covering_rhs = Rat(Int(static_cast<long>(n))) *
                         pow_rat(Rat(2), static_cast<long>(n) - 2) * gs_last_sq;
      Rat dual_l1_sq = svp_exact(dual_basis(basis)).norm_sq;
      Rat product_rhs = make_rat(Int(static_cast<long>(n)) * Int(static_cast<long>(n)), Int(4));
      PreparedLattice prep(lll.basis);
      SplitMix64 g(mix64(content_hash(basis), 0xc0be7ull));
      bool ok = true;
      std::string detail;
      for (int t = 0; t < kTargets && ok; ++t) {
        RatVec target(basis[0].size(), Rat(0));
        for (size_t i = 0; i < n; ++i) {
          Rat u = make_rat(Int(static_cast<long>(uniform_below(g, kGrid))), Int(kGrid));
          target = vec_add(target, vec_scale(lll.basis[i], u));
        }
        Rat dist_sq = prep.closest(target).dist_sq;
        if (dist_sq > covering_rhs) {
          ok = false;
          detail = "target " + std::to_string(t) + " breaks the covering bound";
        } else if (dist_sq * dual_l1_sq > product_rhs) {
          ok = false;
          detail = "target " + std::to_string(t) + " breaks the transference product";
        }
      }
      push_row(rows, entry.id, "covering-bounds", ok,
               ok ? "targets=" + std::to_string(kTargets) : detail);
    });
  }
  return rows;
}

std::vector<ValidationRow> validate_sparsify_index(const Int& p,
                                                   const std::vector<CorpusEntry>& corpus) {
  std::vector<ValidationRow> rows;
  constexpr int kDraws = 4;
  for (const auto& entry : corpus) {
    guarded(rows, entry.id, "sparsify-index", [&] {
      const RatMat& basis = entry.instance.basis;
      size_t n = basis.size();
      CoeffSolver solver(basis);
      SplitMix64 g(mix64(content_hash(basis), 0x5697ull));
      bool ok = true;
      std::string detail;
      for (int d = 0; d < kDraws && ok; ++d) {
        IntVec z(n);
        bool zero = true;
        for (auto& zi : z) {
          zi = Int(static_cast<long>(uniform_below(g, p.get_ui())));
          if (zi != 0) zero = false;
        }
        if (d == 0) {
          std::fill(z.begin(), z.end(), Int(0));  // the z = 0 full-lattice case
          zero = true;
        }
        SparsificationSample sample = sparsify(basis, p, z);
        Int det = det_int(sample.transform);
        Int want = zero ? Int(1) : p;
        if (det != want && det != -want) {
          ok = false;
          detail = "transform determinant " + det.get_str() + ", expected +-" + want.get_str();
          break;
        }
        for (size_t i = 0; i < sample.sublattice.size() && ok; ++i) {
          IntVec coeffs;
          if (!solver.integer_coefficients(sample.sublattice[i], coeffs)) {
            ok = false;
            detail = "sublattice row outside the lattice";
            break;
          }
          Int dot(0);
          for (size_t j = 0; j < n; ++j) dot += z[j] * coeffs[j];
          if (dot % p != 0) {
            ok = false;
            detail = "sublattice row misses the congruence";
          }
        }
      }
      push_row(rows, entry.id, "sparsify-index", ok, ok ? "draws=" + std::to_string(kDraws) : detail);
    });
  }
  return rows;
}

std::string format_validation(const std::vector<ValidationRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << "instance=" << r.id << " check=" << r.check << " pass=" << (r.ok ? 1 : 0);
    if (!r.detail.empty()) os << " detail=" << r.detail;
    os << "\n";
  }
  return os.str();
}

bool all_ok(const std::vector<ValidationRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.ok; });
}

}  // namespace latlab
