#include "latlab/sparsify.hpp"

#include <algorithm>

#include "latlab/basis.hpp"
#include "latlab/error.hpp"
#include "latlab/primes.hpp"
#include "latlab/prng.hpp"

namespace latlab {

namespace {

Int mod_reduce(const Int& a, const Int& p) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
  return r;
}

// Pre-reduced representative coefficients for fast repeated membership
// tests: rep i is in L'(z) iff sum_j z_j * residues[i][j] = 0 mod p.
struct MembershipTable {
  uint64_t p = 0;
  std::vector<std::vector<uint64_t>> residues;

  bool member(const std::vector<uint64_t>& z, size_t i) const {
    unsigned __int128 acc = 0;
    const std::vector<uint64_t>& row = residues[i];
    for (size_t j = 0; j < row.size(); ++j)
      acc = (acc + static_cast<unsigned __int128>(z[j]) * row[j]) % p;
    return acc == 0;
  }
};

struct EventSetup {
  std::vector<LatticePoint> reps;  // sorted primitive representatives <= r2
  size_t count_r1 = 0;             // prefix of reps with norm_sq <= r1_sq
  MembershipTable table;
};

std::vector<LatticePoint> filter_primitive(std::vector<LatticePoint> points) {
  std::vector<LatticePoint> reps;
  for (LatticePoint& p : points) {
    if (!lex_positive(p.coeffs)) continue;
    Int g(0);
    for (const Int& c : p.coeffs) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) reps.push_back(std::move(p));
  }
  return reps;
}

MembershipTable residue_table(const std::vector<LatticePoint>& reps, const Int& p) {
  if (!p.fits_ulong_p())
    throw CapExceededError("sparsification: prime too large for membership tables");
  MembershipTable table;
  table.p = p.get_ui();
  table.residues.reserve(reps.size());
  for (const LatticePoint& rep : reps) {
    std::vector<uint64_t> row;
    row.reserve(rep.coeffs.size());
    for (const Int& c : rep.coeffs) row.push_back(mod_reduce(c, p).get_ui());
    table.residues.push_back(std::move(row));
  }
  return table;
}

EventSetup build_event_setup(const RatMat& basis, const Int& p, const Rat& r1_sq,
                             const Rat& r2_sq, const EnumerationBudget& budget) {
  if (!is_prime(p)) throw NotPrimeError("sparsification: modulus must be prime");
  if (r1_sq > r2_sq)
    throw InvalidParameterError("sparsification: r1 must not exceed r2");
  PreparedLattice prep(basis, budget);
  Rat lambda1_sq = prep.shortest().norm_sq;
  // r2 < p * lambda_1 keeps p-multiples of short vectors outside the r2
  // ball, so the enumerated representatives decide the event exactly.
  if (r2_sq >= Rat(p * p) * lambda1_sq)
    throw InvalidParameterError("sparsification: r2 must stay below p * lambda_1");
  EventSetup setup;
  setup.reps = filter_primitive(prep.points_in_ball(r2_sq, false));
  while (setup.count_r1 < setup.reps.size() &&
         setup.reps[setup.count_r1].norm_sq <= r1_sq)
    ++setup.count_r1;
  setup.table = residue_table(setup.reps, p);
  return setup;
}

// The proposition event: exactly one representative survives and it is short
// enough. Disjoint union over the short representatives of the single-vector
// events below.
bool proposition_event(const EventSetup& setup, const std::vector<uint64_t>& z) {
  size_t members = 0;
  size_t first = setup.reps.size();
  for (size_t i = 0; i < setup.reps.size(); ++i) {
    if (!setup.table.member(z, i)) continue;
    if (++members > 1) return false;
    first = i;
  }
  return members == 1 && first < setup.count_r1;
}

uint64_t checked_zspace(const Int& p, size_t n, const EnumerationBudget& budget) {
  Int zspace = pow_int(p, static_cast<long>(n));
  if (zspace > Int(static_cast<long>(budget.max_nodes)))
    throw CapExceededError("sparsification: z-space exceeds the enumeration cap");
  return zspace.get_ui();
}

bool advance_odometer(std::vector<uint64_t>& z, uint64_t p) {
  for (size_t j = 0; j < z.size(); ++j) {
    if (++z[j] < p) return true;
    z[j] = 0;
  }
  return false;
}

}  // namespace

SparsificationSample sparsify(const RatMat& basis, const Int& p, const IntVec& z) {
  validate_shape(basis);
  if (!is_prime(p)) throw NotPrimeError("sparsify: modulus must be prime");
  size_t n = basis.size();
  if (z.size() != n) throw InvalidParameterError("sparsify: z must have one entry per basis row");

  SparsificationSample sample;
  sample.prime_p = p;
  sample.z.reserve(n);
  for (const Int& zi : z) sample.z.push_back(mod_reduce(zi, p));

  size_t pivot = n;
  for (size_t i = 0; i < n; ++i) {
    if (sgn(sample.z[i]) != 0) {
      pivot = i;
      break;
    }
  }
  if (pivot == n) {  // z = 0: the functional is trivial and L' = L
    sample.sublattice = basis;
    sample.transform = identity_int(n);
    return sample;
  }

  Int inv;
  mpz_invert(inv.get_mpz_t(), sample.z[pivot].get_mpz_t(), p.get_mpz_t());
  sample.sublattice.resize(n);
  sample.transform = identity_int(n);
  for (size_t i = 0; i < n; ++i) {
    if (i == pivot) {
      sample.sublattice[i] = vec_scale(basis[i], Rat(p));
      sample.transform[i][i] = p;
      continue;
    }
    Int m = mod_reduce(sample.z[i] * inv, p);
    sample.sublattice[i] = vec_sub(basis[i], vec_scale(basis[pivot], Rat(m)));
    sample.transform[i][pivot] = -m;
  }
  return sample;
}

std::vector<LatticePoint> primitive_representatives(const RatMat& basis, const Rat& radius_sq,
                                                    const EnumerationBudget& budget) {
  PreparedLattice prep(basis, budget);
  return filter_primitive(prep.points_in_ball(radius_sq, false));
}

Rat exact_sparsification_probability(const RatMat& basis, const Int& p, const Rat& r1_sq,
                                     const Rat& r2_sq, const EnumerationBudget& budget) {
  EventSetup setup = build_event_setup(basis, p, r1_sq, r2_sq, budget);
  uint64_t total = checked_zspace(p, basis.size(), budget);
  std::vector<uint64_t> z(basis.size(), 0);
  Int hits(0);
  for (uint64_t iter = 0; iter < total; ++iter) {
    if (proposition_event(setup, z)) ++hits;
    advance_odometer(z, setup.table.p);
  }
  return make_rat(hits, pow_int(p, static_cast<long>(basis.size())));
}

Rat exact_single_vector_probability(const RatMat& basis, const Int& p, const Rat& r2_sq,
                                    size_t which, const EnumerationBudget& budget) {
  if (!is_prime(p)) throw NotPrimeError("sparsification: modulus must be prime");
  PreparedLattice prep(basis, budget);
  std::vector<LatticePoint> reps = filter_primitive(prep.points_in_ball(r2_sq, false));
  if (which >= reps.size())
    throw InvalidParameterError("single-vector event: representative index out of range");
  MembershipTable table = residue_table(reps, p);
  uint64_t total = checked_zspace(p, basis.size(), budget);
  std::vector<uint64_t> z(basis.size(), 0);
  Int hits(0);
  for (uint64_t iter = 0; iter < total; ++iter) {
    bool hit = table.member(z, which);
    for (size_t i = 0; hit && i < reps.size(); ++i)
      if (i != which && table.member(z, i)) hit = false;
    if (hit) ++hits;
    advance_odometer(z, table.p);
  }
  return make_rat(hits, pow_int(p, static_cast<long>(basis.size())));
}

bool sparsification_condition(const Int& p, const Int& xi) {
  if (p < 2 || sgn(xi) < 0) throw InvalidParameterError("sparsification_condition: bad inputs");
  if (sgn(xi) == 0) return true;
  if (!p.fits_ulong_p() || p > (1 << 24) || xi > (1 << 20))
    throw CapExceededError("sparsification_condition: inputs exceed the exact-comparison range");
  // xi <= p / (20 log p)  <=>  p^(20 xi) <= 2^p, all in exact integers.
  Int lhs = pow_int(p, 20 * static_cast<long>(xi.get_ui()));
  Int rhs = pow_int(Int(2), static_cast<long>(p.get_ui()));
  return lhs <= rhs;
}

SparsificationStats sample_sparsification_stats(const RatMat& basis, const Int& p,
                                                const Rat& r1_sq, const Rat& r2_sq,
                                                long long trials, uint64_t seed,
                                                const EnumerationBudget& budget) {
  if (trials < 1) throw InvalidParameterError("sample_sparsification_stats: trials must be >= 1");
  EventSetup setup = build_event_setup(basis, p, r1_sq, r2_sq, budget);
  SparsificationStats stats;
  stats.trials = trials;
  std::vector<uint64_t> z(basis.size());
  for (long long t = 0; t < trials; ++t) {
    SplitMix64 g(mix64(seed, static_cast<uint64_t>(t)));
    for (size_t j = 0; j < z.size(); ++j) z[j] = uniform_below(g, setup.table.p);
    if (proposition_event(setup, z)) ++stats.hits;
  }
  stats.frequency =
      make_rat(Int(static_cast<long>(stats.hits)), Int(static_cast<long>(trials)));
  Rat xi1(static_cast<long>(setup.count_r1));
  Rat xi2(static_cast<long>(setup.reps.size()));
  Rat rp(p);
  stats.bound_lower = xi1 / rp * (Rat(1) - xi2 / rp);
  stats.bound_upper = xi1 / rp;
  bool lower_ok =
      stats.frequency >= stats.bound_lower || frequency_consistent(stats, stats.bound_lower);
  bool upper_ok =
      stats.frequency <= stats.bound_upper || frequency_consistent(stats, stats.bound_upper);
  stats.consistent = lower_ok && upper_ok;
  return stats;
}

bool frequency_consistent(const SparsificationStats& stats, const Rat& reference, long sigmas) {
  if (stats.trials < 1 || sigmas < 0)
    throw InvalidParameterError("frequency_consistent: bad inputs");
  Rat diff = stats.frequency - reference;
  Rat band = Rat(sigmas) * Rat(sigmas) * reference * (Rat(1) - reference);
  return diff * diff * Rat(static_cast<long>(stats.trials)) <= band;
}

}  // namespace latlab
