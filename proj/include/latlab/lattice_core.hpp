#pragma once

#include "latlab/basis.hpp"
#include "latlab/rational.hpp"

namespace latlab {

// Exact Gram-Schmidt data for a row basis: gs_vectors[i] is the component of
// basis[i] orthogonal to all earlier rows, mu[i][j] (j < i) the projection
// coefficients (mu[i][i] = 1), gs_sq_norms[i] = |gs_vectors[i]|^2, positive
// for an independent family.
struct GramSchmidt {
  RatMat gs_vectors;
  RatMat mu;
  RatVec gs_sq_norms;
};

// Throws DependentInputError when the rows are linearly dependent.
GramSchmidt gram_schmidt(const RatMat& basis);

struct LllResult {
  RatMat basis;      // reduced rows
  IntMat transform;  // unimodular; basis = transform * input
};

// Lattice reduction with parameter exactly 3/4, run entirely in integer
// arithmetic on the scaled Gram matrix so rational inputs are exact too.
LllResult lll_reduce(const RatMat& basis);

// Both reduction conditions (size reduction and the exchange condition with
// parameter 3/4) checked in exact rational arithmetic.
bool is_lll_reduced(const RatMat& basis);

// Rows d_i of the result satisfy <d_i, b_j> = delta_ij and span the same
// subspace; dual of dual returns the original exactly.
RatMat dual_basis(const RatMat& basis);

// True iff the point's integer coefficient vector over the basis has gcd 1.
// Throws ZeroVectorError for the zero point, NonMemberError when the point
// is not in the lattice.
bool is_primitive(const RatMat& basis, const RatVec& point);

// Basis of the same lattice whose first row is the given lattice vector; a
// non-primitive input is first divided by the gcd of its coefficients. Built
// by unimodular completion of the coefficient vector with extended-gcd
// column steps.
RatMat extend_to_basis(const RatMat& basis, const RatVec& vector);

// Inclusive integer interval [lo, hi].
struct IndexWindow {
  Int lo;
  Int hi;
};

// All integers within slack of a = <dual_first, target>: lo = floor(a -
// slack), hi = ceil(a + slack). dual_first must pair to (1, 0, ..., 0)
// against the basis rows (it is the first dual vector).
IndexWindow nearby_hyperplane_indices(const RatMat& basis, const RatVec& dual_first,
                                      const RatVec& target, const Rat& slack);

struct Projection {
  RatVec span_coeffs;  // coefficients over the sub-basis rows
  RatVec ambient;      // projected point in ambient coordinates
  RatVec residual;     // point - ambient, orthogonal to the span
  Rat residual_sq;
};

// Exact orthogonal projection onto the row span of sub_basis;
// |point|^2 = |ambient|^2 + residual_sq holds exactly.
Projection project_onto_span(const RatMat& sub_basis, const RatVec& point);

}  // namespace latlab
