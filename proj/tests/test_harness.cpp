#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "latlab/error.hpp"
#include "latlab/experiment.hpp"
#include "latlab/instance.hpp"
#include "latlab/lattice_core.hpp"
#include "latlab/solvers.hpp"

using namespace latlab;

namespace {

Rat rat(long num, long den) { return make_rat(Int(num), Int(den)); }

/* Fresh scratch directory per test run; removed by the OS, not by us, so a
 * failing test leaves its evidence behind. */
std::string scratch_dir(const std::string& tag) {
  std::string dir = (std::filesystem::temp_directory_path() / ("latlab_harness_" + tag)).string();
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<CorpusEntry> small_corpus(const std::vector<std::pair<std::string, int>>& specs,
                                      uint64_t seed) {
  std::vector<CorpusEntry> corpus;
  for (const auto& [kind, rank] : specs)
    corpus.push_back({instance_file_name(kind, rank, seed), generate_instance(kind, rank, seed)});
  return corpus;
}

}  // namespace

TEST_CASE("instance text round-trips byte for byte") {
  for (const std::string& kind : instance_kinds()) {
    Instance inst = generate_instance(kind, 3, 1);
    std::string text = format_instance(inst);
    Instance back = parse_instance(text);
    CHECK(format_instance(back) == text);
    CHECK(back.basis == inst.basis);
    REQUIRE(back.target.has_value());
    CHECK(*back.target == *inst.target);
  }
}

TEST_CASE("instance files store and load through the filesystem") {
  std::string dir = scratch_dir("store");
  Instance inst = generate_instance("diagonal", 2, 0);
  std::string path = dir + "/" + instance_file_name("diagonal", 2, 0);
  CHECK(instance_file_name("diagonal", 2, 0) == "diagonal_r2_s0.txt");
  store_instance(inst, path);
  Instance back = load_instance(path);
  CHECK(format_instance(back) == format_instance(inst));
}

TEST_CASE("parser rejects malformed instances with positioned messages") {
  CHECK_THROWS_AS(parse_instance(""), ParseError);
  CHECK_THROWS_AS(parse_instance("2 x\n1 0\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_instance("2 2\n1 0\n"), ParseError);          // missing row
  CHECK_THROWS_AS(parse_instance("2 2\n1 0 3\n0 1\n"), ParseError);   // extra column
  CHECK_THROWS_AS(parse_instance("2 2\n1 z\n0 1\n"), ParseError);     // bad token
  CHECK_THROWS_AS(parse_instance("2 2\n1 0\n0 1\nt: 1\n"), ParseError);  // short target
  CHECK_THROWS_AS(parse_instance("2 2\n1 0\n2 0\n"), DependentInputError);
  CHECK_THROWS_AS(parse_instance("t: 1 2\n2 2\n1 0\n0 1\n"), ParseError);
  // Trailing junk after a complete instance is an error, not ignored.
  CHECK_THROWS_AS(parse_instance("2 2\n1 0\n0 1\n5 5\n"), ParseError);
}

TEST_CASE("parser accepts comments and a target row") {
  Instance inst = parse_instance("# hello\n2 2\n1/2 0\n0 3\nt: 1/3 -2\n");
  CHECK(inst.comments.size() == 1);
  CHECK(inst.basis[0][0] == rat(1, 2));
  REQUIRE(inst.target.has_value());
  CHECK((*inst.target)[0] == rat(1, 3));
}

TEST_CASE("generation is deterministic and kind/rank-validated") {
  Instance a = generate_instance("knapsack", 4, 9);
  Instance b = generate_instance("knapsack", 4, 9);
  CHECK(format_instance(a) == format_instance(b));
  CHECK(format_instance(a) != format_instance(generate_instance("knapsack", 4, 10)));
  CHECK_THROWS_AS(generate_instance("mystery", 3, 0), InvalidParameterError);
  CHECK_THROWS_AS(generate_instance("diagonal", 0, 0), InvalidParameterError);
  CHECK_THROWS_AS(generate_instance("diagonal", 13, 0), CapExceededError);
}

TEST_CASE("every kind produces a full-rank basis with a target") {
  for (const std::string& kind : instance_kinds()) {
    for (int rank : {1, 2, 5}) {
      Instance inst = generate_instance(kind, rank, 2);
      CHECK(inst.basis.size() == static_cast<size_t>(rank));
      CHECK(inst.target.has_value());
      CHECK(gram_schmidt(inst.basis).gs_sq_norms.back() > Rat(0));
    }
  }
}

TEST_CASE("planted kinds control their shortest vector") {
  Rat w = svp_exact(generate_instance("planted-short", 5, 3).basis).norm_sq;
  CHECK((w == Rat(2) || w == Rat(3)));
  CHECK(svp_exact(generate_instance("knapsack", 4, 0).basis).norm_sq == Rat(2));
  // planted-close: the target sits strictly inside half the minimum distance,
  // so the planted vector is the unique closest one.
  Instance close = generate_instance("planted-close", 4, 1);
  Rat l1_sq = svp_exact(close.basis).norm_sq;
  ClosestResult r = PreparedLattice(close.basis).closest(*close.target);
  CHECK(r.dist_sq * Rat(4) < l1_sq);
}

TEST_CASE("rank >= 6 instances carry at least two shortest pairs") {
  for (const std::string& kind : instance_kinds()) {
    Instance inst = generate_instance(kind, 6, 0);
    Rat l1_sq = svp_exact(inst.basis).norm_sq;
    CHECK(count_primitive(inst.basis, l1_sq).count >= Int(2));
  }
}

TEST_CASE("load_corpus returns sorted ids and skips foreign files") {
  std::string dir = scratch_dir("corpus");
  store_instance(generate_instance("diagonal", 2, 1), dir + "/diagonal_r2_s1.txt");
  store_instance(generate_instance("knapsack", 2, 0), dir + "/knapsack_r2_s0.txt");
  std::ofstream(dir + "/notes.md") << "not an instance\n";
  std::vector<CorpusEntry> corpus = load_corpus(dir);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].id == "diagonal_r2_s1");
  CHECK(corpus[1].id == "knapsack_r2_s0");
}

TEST_CASE("experiment handles an empty corpus as vacuous success") {
  RunConfig cfg;
  cfg.reduction = "det-svp";
  ExperimentResult r = run_experiment(cfg, {});
  CHECK(r.summary.instances == 0);
  CHECK(r.summary.all_passed);
  CHECK(r.summary.success_rate == Rat(1));
}

TEST_CASE("exact-oracle det tower is exactly optimal across a mixed corpus") {
  auto corpus = small_corpus({{"diagonal", 2}, {"knapsack", 3}, {"unimodular-scramble", 4}}, 1);
  RunConfig cfg;
  cfg.reduction = "det-cvp";
  cfg.p = Int(5);
  ExperimentResult r = run_experiment(cfg, corpus);
  CHECK(r.summary.all_passed);
  CHECK(r.summary.max_factor_sq == Rat(1));
  CHECK(r.summary.max_call_dimension <= 4);
  for (const auto& out : r.outcomes) {
    CHECK(out.passed);
    CHECK(out.bound_asserted);
  }
}

TEST_CASE("amplified svp-usvp schedules stop at the first good seed") {
  auto corpus = small_corpus({{"planted-short", 4}}, 2);
  RunConfig cfg;
  cfg.reduction = "svp-usvp";
  cfg.gamma = rat(11, 10);
  cfg.a = Rat(2);
  cfg.violation = ViolationPolicy::ARBITRARY_SEEDED;
  cfg.trials = 10;
  cfg.seed = 5;
  ExperimentResult r = run_experiment(cfg, corpus);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].passed);
  CHECK(r.outcomes[0].reports.size() <= 10);
  CHECK(r.outcomes[0].seeds.size() == r.outcomes[0].reports.size());
  // The instance's answer is its best run, and it met the asserted bound.
  CHECK(le_scaled_pow(r.outcomes[0].best_factor_sq, cfg.gamma, r.outcomes[0].bound_num,
                      r.outcomes[0].bound_den, Rat(1)));
}

TEST_CASE("a missing target is reported per instance, not fatally") {
  auto corpus = small_corpus({{"diagonal", 2}, {"knapsack", 2}}, 0);
  corpus[0].instance.target.reset();
  RunConfig cfg;
  cfg.reduction = "cvp-guided";
  cfg.h = 1;
  ExperimentResult r = run_experiment(cfg, corpus);
  CHECK(r.summary.instances == 2);
  CHECK(r.summary.passed == 1);
  CHECK(r.summary.errors.size() == 1);
  CHECK_FALSE(r.summary.all_passed);
  CHECK(r.outcomes[0].error.find("target") != std::string::npos);
}

TEST_CASE("the chain reduction measures without asserting a bound") {
  auto corpus = small_corpus({{"knapsack", 2}}, 3);
  RunConfig cfg;
  cfg.reduction = "cvp-chain";
  cfg.chain_exact_legs = true;
  ExperimentResult r = run_experiment(cfg, corpus);
  REQUIRE(r.outcomes.size() == 1);
  CHECK_FALSE(r.outcomes[0].bound_asserted);
  CHECK(r.outcomes[0].passed);
}

TEST_CASE("experiment reports carry the audit and bound lines") {
  auto corpus = small_corpus({{"diagonal", 2}}, 0);
  RunConfig cfg;
  cfg.reduction = "svp-gapsvp";
  cfg.a = Rat(1);
  // A single trial at a=1 succeeds only with constant probability by design;
  // the schedule amplifies it far past unit-test flakiness.
  cfg.trials = 32;
  std::string text = format_experiment(run_experiment(cfg, corpus));
  CHECK(text.find("reduction=svp-gapsvp") != std::string::npos);
  CHECK(text.find("gapsvp_policy=honest-threshold") != std::string::npos);
  CHECK(text.find("audit_max_dimension=") != std::string::npos);
  CHECK(text.find("bound_exponent=") != std::string::npos);
  CHECK(text.find("all_passed=1") != std::string::npos);
}

TEST_CASE("structural validators pass on generated instances") {
  auto corpus = small_corpus(
      {{"unimodular-scramble", 3}, {"planted-short", 4}, {"diagonal", 3}, {"knapsack", 3}}, 1);
  CHECK(all_ok(validate_point_count(corpus)));
  CHECK(all_ok(validate_lll_bounds(corpus)));
  CHECK(all_ok(validate_covering_bounds(corpus)));
  CHECK(all_ok(validate_sparsify_index(Int(5), corpus)));
  std::string text = format_validation(validate_point_count(corpus));
  CHECK(text.find("check=point-count") != std::string::npos);
  CHECK(text.find("pass=1") != std::string::npos);
}

TEST_CASE("sparsification table rows sit inside their bands") {
  auto corpus = small_corpus({{"diagonal", 2}, {"knapsack", 2}}, 0);
  auto rows = sparsification_validation(Int(349), corpus);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.ok);
    CHECK(row.pair_count >= Int(1));
    CHECK(row.single_lower <= row.single_probability);
    CHECK(row.single_probability <= row.single_upper);
    CHECK(row.compound_lower <= row.compound_probability);
    CHECK(row.compound_probability <= row.compound_upper);
  }
  std::string text = format_sparsification(rows);
  CHECK(text.find("pairs=") != std::string::npos);
}

TEST_CASE("the checked-in corpus is complete and canonical") {
  std::vector<CorpusEntry> corpus = load_corpus("corpus");
  CHECK(corpus.size() == instance_kinds().size() * 7 * 4);
  for (const auto& entry : corpus) {
    size_t r_pos = entry.id.rfind("_r");
    size_t s_pos = entry.id.rfind("_s");
    REQUIRE(r_pos != std::string::npos);
    REQUIRE(s_pos != std::string::npos);
    std::string kind = entry.id.substr(0, r_pos);
    int rank = std::stoi(entry.id.substr(r_pos + 2, s_pos - r_pos - 2));
    uint64_t seed = std::stoull(entry.id.substr(s_pos + 2));
    Instance regen = generate_instance(kind, rank, seed);
    CHECK(format_instance(regen) == format_instance(entry.instance));
  }
}
