#pragma once

#include <vector>

#include "latlab/lattice_core.hpp"
#include "latlab/rational.hpp"

namespace latlab {

// Hard limits for one enumeration call. Exceeding a limit raises
// BudgetExceededError; results are never silently truncated. When
// radius_bound_sq is nonnegative, ball listings refuse radii above it.
struct EnumerationBudget {
  long long max_nodes = 10'000'000;   // visited coefficient assignments
  long long max_points = 2'000'000;   // collected candidates (ball listings)
  Rat radius_bound_sq = Rat(-1);      // negative means no ceiling
  size_t rank_cap = 12;               // desk-scale rank limit
};

// A lattice point along with its exact coefficient vector over the ORIGINAL
// basis the solver was built from. norm_sq is always |coords|^2.
struct LatticePoint {
  RatVec coords;
  IntVec coeffs;
  Rat norm_sq;
};

struct ClosestResult {
  LatticePoint point;
  Rat dist_sq;  // squared distance from the target to point
};

// xi(L, r): primitive vectors of squared length <= radius_sq, counting the
// pair {x, -x} once.
struct PrimitiveCount {
  Rat radius_sq;
  Int count;
};

// Reduction, Gram-Schmidt data, and exact enumeration over one lattice.
// Construction runs the reduction once; solver calls share it. All methods
// are const and exact; desk-scale ranks only (default cap 12).
class PreparedLattice {
 public:
  explicit PreparedLattice(const RatMat& basis, EnumerationBudget budget = {});

  // Shortest nonzero vector; ties resolved to the lexicographically
  // smallest coefficient vector over the original basis.
  LatticePoint shortest() const;

  // Closest lattice point to the target, same tie rule.
  ClosestResult closest(const RatVec& target) const;

  // Shortest squared length among lattice vectors independent from a fixed
  // shortest vector. Throws InvalidParameterError on rank-1 lattices.
  Rat second_minimum() const;

  // Every lattice point y with |y|^2 <= radius_sq, optionally without 0.
  // Order: increasing norm_sq, then lexicographic original coefficients.
  std::vector<LatticePoint> points_in_ball(const Rat& radius_sq, bool include_zero) const;

  PrimitiveCount primitive_count(const Rat& radius_sq) const;

  // Nearest-plane walk; exact squared distance in dist_sq.
  ClosestResult babai(const RatVec& target) const;

  const RatMat& original() const { return original_; }
  const RatMat& reduced() const { return reduced_; }
  const IntMat& transform() const { return transform_; }
  const GramSchmidt& gs() const { return gs_; }
  size_t rank() const { return original_.size(); }
  size_t ambient_dim() const { return original_[0].size(); }
  Rat min_gs_sq() const;
  long long nodes_used() const { return nodes_used_; }

 private:
  RatMat original_;
  RatMat reduced_;
  IntMat transform_;
  GramSchmidt gs_;
  EnumerationBudget budget_;
  mutable long long nodes_used_ = 0;

  friend class Enumerator;
};

// Free-function forms used throughout: each builds a PreparedLattice.
LatticePoint svp_exact(const RatMat& basis);
LatticePoint cvp_exact(const RatMat& basis, const RatVec& target);
Rat lambda2(const RatMat& basis);
PrimitiveCount count_primitive(const RatMat& basis, const Rat& radius_sq);

// True iff |{y in L : |y| <= r lambda_1}| <= 2 ceil(2r)^n - 1, both sides
// exact. r_multiplier >= 1.
bool verify_point_count_bound(const RatMat& basis, const Rat& r_multiplier);

}  // namespace latlab
