/* latlab: exact lattice laboratory.
 *
 * Subcommands:
 *   solve svp|cvp <file>          exact optimum by enumeration
 *   reduce <name> <file> ...      one reduction run, report on stdout
 *   sparsify <file> --p --seed    one seeded random sublattice
 *   gen <kind> --rank --seed      deterministic instance to stdout or --out
 *   validate <group> --dir ...    structural validator tables
 *   report <dir>                  validators + exact-case battery
 *
 * Every run is reproducible bit-for-bit from the command line and input
 * files. Exit code is nonzero iff some check failed.
 */

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latlab/error.hpp"
#include "latlab/experiment.hpp"
#include "latlab/instance.hpp"
#include "latlab/lattice_core.hpp"
#include "latlab/prng.hpp"
#include "latlab/solvers.hpp"
#include "latlab/sparsify.hpp"

namespace {

using namespace latlab;

PolicyKind parse_policy(const std::string& name) {
  if (name == "honest") return PolicyKind::HONEST_THRESHOLD;
  if (name == "adversarial-yes") return PolicyKind::ADVERSARIAL_YES;
  if (name == "adversarial-no") return PolicyKind::ADVERSARIAL_NO;
  if (name == "seeded") return PolicyKind::SEEDED_RANDOM;
  throw InvalidParameterError(
      "policy must be honest, adversarial-yes, adversarial-no, or seeded");
}

ViolationPolicy parse_violation(const std::string& name) {
  if (name == "shortest-anyway") return ViolationPolicy::SHORTEST_ANYWAY;
  if (name == "second-minimum") return ViolationPolicy::SECOND_MINIMUM;
  if (name == "arbitrary-seeded") return ViolationPolicy::ARBITRARY_SEEDED;
  throw InvalidParameterError(
      "violation must be shortest-anyway, second-minimum, or arbitrary-seeded");
}

int cmd_solve(const std::string& problem, const std::string& file) {
  Instance inst = load_instance(file);
  if (problem == "svp") {
    LatticePoint sv = svp_exact(inst.basis);
    std::cout << "problem=svp\nnorm_sq=" << to_string(sv.norm_sq) << "\npoint=" << to_string(sv.coords)
              << "\n";
    return 0;
  }
  if (!inst.target) throw InvalidParameterError(file + " has no target row");
  ClosestResult r = PreparedLattice(inst.basis).closest(*inst.target);
  std::cout << "problem=cvp\ndist_sq=" << to_string(r.dist_sq) << "\npoint=" << to_string(r.point.coords)
            << "\n";
  return 0;
}

int cmd_reduce(const RunConfig& cfg, const std::string& file) {
  std::vector<CorpusEntry> one;
  one.push_back({file, load_instance(file)});
  ExperimentResult result = run_experiment(cfg, one);
  std::cout << format_experiment(result);
  return result.summary.all_passed ? 0 : 1;
}

int cmd_sparsify(const std::string& file, long p_in, uint64_t seed) {
  Instance inst = load_instance(file);
  Int p(p_in);
  if (p < 2) throw InvalidParameterError("p must be at least 2");
  SplitMix64 g(mix64(seed, 0x59a55ull));
  IntVec z(inst.basis.size());
  for (auto& zi : z) zi = Int(static_cast<long>(uniform_below(g, p.get_ui())));
  SparsificationSample sample = sparsify(inst.basis, p, z);
  std::cout << "p=" << p.get_str() << "\nseed=" << seed << "\nz=";
  for (size_t i = 0; i < z.size(); ++i) std::cout << (i ? " " : "") << z[i].get_str();
  std::cout << "\ntransform_det=" << det_int(sample.transform).get_str() << "\n";
  for (const auto& row : sample.sublattice) std::cout << to_string(row) << "\n";
  return 0;
}

int cmd_gen(const std::string& kind, int rank, uint64_t seed, const std::string& out_dir) {
  Instance inst = generate_instance(kind, rank, seed);
  if (out_dir.empty()) {
    std::cout << format_instance(inst);
  } else {
    std::string path = out_dir + "/" + instance_file_name(kind, rank, seed);
    store_instance(inst, path);
    std::cout << path << "\n";
  }
  return 0;
}

/* Instances whose z-space p^rank stays within the exact-enumeration cap. */
std::vector<CorpusEntry> sparsify_eligible(const std::vector<CorpusEntry>& corpus, const Int& p) {
  EnumerationBudget budget;
  std::vector<CorpusEntry> eligible;
  for (const auto& e : corpus) {
    Int space(1);
    bool fits = true;
    for (size_t i = 0; i < e.instance.basis.size() && fits; ++i) {
      space *= p;
      if (space > Int(static_cast<long>(budget.max_nodes))) fits = false;
    }
    if (fits) eligible.push_back(e);
  }
  return eligible;
}

int cmd_validate(const std::string& group, const std::string& dir, long p_in) {
  std::vector<CorpusEntry> corpus = load_corpus(dir);
  if (group == "sparsification") {
    std::vector<CorpusEntry> eligible = sparsify_eligible(corpus, Int(p_in));
    auto rows = sparsification_validation(Int(p_in), eligible);
    std::cout << format_sparsification(rows);
    std::cout << "checked=" << rows.size() << " skipped=" << corpus.size() - eligible.size()
              << "\n";
    bool ok = !rows.empty() && std::all_of(rows.begin(), rows.end(),
                                           [](const SparsificationRow& r) { return r.ok; });
    return ok ? 0 : 1;
  }
  std::vector<ValidationRow> rows;
  if (group == "lll-bounds")
    rows = validate_lll_bounds(corpus);
  else if (group == "point-count")
    rows = validate_point_count(corpus);
  else if (group == "covering-bounds")
    rows = validate_covering_bounds(corpus);
  else if (group == "sparsify-index")
    rows = validate_sparsify_index(Int(p_in), corpus);
  else
    throw InvalidParameterError("unknown validation group: " + group);
  std::cout << format_validation(rows);
  return (!rows.empty() && all_ok(rows)) ? 0 : 1;
}

/* Validators plus the exact-case battery (gamma = 1, honest oracles) of all
 * four reductions over a corpus directory. */
int cmd_report(const std::string& dir) {
  std::vector<CorpusEntry> corpus = load_corpus(dir);
  bool ok = !corpus.empty();

  for (const std::string& group :
       {std::string("point-count"), std::string("lll-bounds"), std::string("covering-bounds")}) {
    std::vector<ValidationRow> rows;
    if (group == "point-count") rows = validate_point_count(corpus);
    if (group == "lll-bounds") rows = validate_lll_bounds(corpus);
    if (group == "covering-bounds") rows = validate_covering_bounds(corpus);
    std::cout << format_validation(rows);
    ok = ok && all_ok(rows);
  }
  {
    auto rows = validate_sparsify_index(Int(5), corpus);
    std::cout << format_validation(rows);
    ok = ok && all_ok(rows);
  }

  std::vector<RunConfig> battery;
  RunConfig usvp;
  usvp.reduction = "svp-usvp";
  usvp.a = Rat(1);
  usvp.trials = 64;
  battery.push_back(usvp);
  RunConfig guided;
  guided.reduction = "cvp-guided";
  guided.ell = 1;
  guided.h = 1;
  battery.push_back(guided);
  RunConfig dsvp;
  dsvp.reduction = "det-svp";
  dsvp.p = Int(5);
  battery.push_back(dsvp);
  RunConfig dcvp;
  dcvp.reduction = "det-cvp";
  dcvp.p = Int(5);
  battery.push_back(dcvp);
  for (const auto& cfg : battery) {
    ExperimentResult result = run_experiment(cfg, corpus);
    std::cout << format_experiment(result) << "\n";
    ok = ok && result.summary.all_passed && result.summary.max_factor_sq == Rat(1);
  }
  std::cout << "report=" << (ok ? "pass" : "fail") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact lattice laboratory: solvers, oracles, reductions"};
  app.require_subcommand(1);

  std::string file, dir, out_dir, kind;
  std::string problem, reduction, policy_name = "honest", violation_name = "shortest-anyway";
  std::string gamma_str = "1", a_str = "1";
  long ell = 1, h = 1, p_in = 5, trials = 1;
  long long budget = 0;
  int rank = 2;
  uint64_t seed = 0, policy_seed = 0;
  bool degraded = false, exact_legs = false;

  auto* solve = app.add_subcommand("solve", "exact SVP/CVP by enumeration");
  solve->add_option("problem", problem, "svp or cvp")->required()
      ->check(CLI::IsMember({"svp", "cvp"}));
  solve->add_option("file", file, "instance file")->required();

  auto* reduce = app.add_subcommand("reduce", "run one reduction");
  reduce->add_option("name", reduction, "reduction name")->required()
      ->check(CLI::IsMember({"svp-usvp", "svp-gapsvp", "cvp-guided", "det-svp", "det-cvp",
                             "cvp-chain"}));
  reduce->add_option("file", file, "instance file")->required();
  reduce->add_option("--gamma", gamma_str, "oracle factor (rational, e.g. 21/20 or 1.05)");
  reduce->add_option("--a", a_str, "exponent parameter of the randomized search");
  reduce->add_option("--ell", ell, "branching depth (cvp-guided)");
  reduce->add_option("--p", p_in, "modulus (det towers)");
  reduce->add_option("--h-factor", h, "approximate-shortest factor (cvp-guided)");
  reduce->add_option("--policy", policy_name,
                     "gap policy: honest, adversarial-yes, adversarial-no, seeded");
  reduce->add_option("--policy-seed", policy_seed, "seed of the seeded gap policy");
  reduce->add_option("--violation", violation_name,
                     "uSVP violation policy: shortest-anyway, second-minimum, arbitrary-seeded");
  reduce->add_option("--seed", seed, "base run seed");
  reduce->add_option("--trials", trials, "seeds per instance, stop at first success");
  reduce->add_option("--budget", budget, "total sparsification sample cap");
  reduce->add_flag("--degraded-hsvp", degraded, "degraded approximate-shortest answers");
  reduce->add_flag("--exact-legs", exact_legs, "cvp-chain: exact inner legs");

  auto* sparsify_cmd = app.add_subcommand("sparsify", "one seeded random sublattice");
  sparsify_cmd->add_option("file", file, "instance file")->required();
  sparsify_cmd->add_option("--p", p_in, "index (prime for the theorems; >= 2 accepted)");
  sparsify_cmd->add_option("--seed", seed, "seed of the z draw");

  auto* gen = app.add_subcommand("gen", "generate a deterministic instance");
  gen->add_option("kind", kind, "instance family")->required()
      ->check(CLI::IsMember(instance_kinds()));
  gen->add_option("--rank", rank, "lattice rank")->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_dir, "write <kind>_r<rank>_s<seed>.txt into this directory");

  auto* validate = app.add_subcommand("validate", "structural validator tables");
  validate->add_option("group", problem,
                       "sparsification, lll-bounds, point-count, covering-bounds, sparsify-index")
      ->required()
      ->check(CLI::IsMember({"sparsification", "lll-bounds", "point-count", "covering-bounds",
                             "sparsify-index"}));
  validate->add_option("--dir", dir, "corpus directory")->default_val("corpus");
  validate->add_option("--p", p_in, "modulus for the sparsification groups")->default_val(349);

  auto* report = app.add_subcommand("report", "validators + exact-case battery");
  report->add_option("dir", dir, "corpus directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(solve)) return cmd_solve(problem, file);
    if (app.got_subcommand(reduce)) {
      RunConfig cfg;
      cfg.reduction = reduction;
      cfg.gamma = parse_rat(gamma_str);
      cfg.a = parse_rat(a_str);
      cfg.ell = ell;
      cfg.p = Int(p_in);
      cfg.h = h;
      cfg.policy = OraclePolicy{parse_policy(policy_name), policy_seed};
      cfg.violation = parse_violation(violation_name);
      cfg.hsvp_degraded = degraded;
      cfg.chain_exact_legs = exact_legs;
      cfg.seed = seed;
      cfg.trials = trials;
      cfg.sample_budget = budget;
      return cmd_reduce(cfg, file);
    }
    if (app.got_subcommand(sparsify_cmd)) return cmd_sparsify(file, p_in, seed);
    if (app.got_subcommand(gen)) return cmd_gen(kind, rank, seed, out_dir);
    if (app.got_subcommand(validate)) return cmd_validate(problem, dir, p_in);
    if (app.got_subcommand(report)) return cmd_report(dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
