#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latlab/rational.hpp"

namespace latlab {

/* One lattice instance as stored on disk: a rank-n basis over an
 * m-dimensional ambient space, an optional CVP target, and free-form
 * comments. The text format is line-oriented:
 *
 *   # comment            (whole-line comments, kept on round-trip)
 *   n m                  (rank and ambient dimension)
 *   <m rationals>        (n basis rows, entries "num/den", "/den" omitted
 *                         when the denominator is 1)
 *   t: <m rationals>     (optional target row)
 *
 * Rationals are written in lowest terms, so write/parse round-trips are
 * byte-exact. */
struct Instance {
  RatMat basis;
  std::optional<RatVec> target;
  std::vector<std::string> comments;  // stored without the leading "# "
};

// An instance with its corpus identity (the file stem). Reports and
// experiment summaries order entries by this id, so merging is stable.
struct CorpusEntry {
  std::string id;
  Instance instance;
};

Instance parse_instance(const std::string& text);
std::string format_instance(const Instance& instance);

Instance load_instance(const std::string& path);
void store_instance(const Instance& instance, const std::string& path);

// Loads every "*.txt" under dir (non-recursive), sorted by file stem.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

/* Deterministic instance generators, one lattice family per kind:
 *
 *   unimodular-scramble  seeded elementary row operations applied to Z^n,
 *                        so lambda_1 = 1 with full unit-vector multiplicity
 *   planted-short        two disjoint-support sign vectors of equal length
 *                        hidden among stretched axes, then scrambled
 *   planted-close        scrambled stretched diagonal; the target is a
 *                        lattice point plus an offset shorter than half the
 *                        packing radius, so the plant is provably closest
 *   diagonal             plain diag(d_1..d_n) with small seeded entries
 *   knapsack             modular-relation lattice of seeded weights with
 *                        planted weight collisions, then scrambled
 *
 * Generation is deterministic from (kind, rank, seed): regenerating always
 * yields byte-identical files. Every instance carries a target (the plant
 * for planted-close, a synthesized nearby point otherwise). Generators for
 * rank >= 6 guarantee at least two shortest-vector pairs, which the
 * randomized reductions' per-seed success rates rely on. */
Instance generate_instance(const std::string& kind, int rank, uint64_t seed);

const std::vector<std::string>& instance_kinds();

// Canonical corpus file name: "<kind>_r<rank>_s<seed>.txt".
std::string instance_file_name(const std::string& kind, int rank, uint64_t seed);

}  // namespace latlab
