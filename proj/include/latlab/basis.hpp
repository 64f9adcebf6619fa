#pragma once

#include <cstddef>
#include <vector>

#include "latlab/rational.hpp"

namespace latlab {

// Exact matrix helpers for row bases (each row is one basis vector).
RatMat rat_mat(const IntMat& m);
IntMat identity_int(size_t n);
RatMat mat_mul(const RatMat& a, const RatMat& b);
IntMat mat_mul_int(const IntMat& a, const IntMat& b);
RatMat transpose(const RatMat& a);

// Rows of the result are integer combinations of the input rows: u * basis.
RatMat apply_transform(const IntMat& u, const RatMat& basis);

// B * B^T; symmetric, positive definite exactly when rows are independent.
RatMat gram_matrix(const RatMat& basis);

Rat det_rat(RatMat a);
Int det_int(IntMat a);
bool is_unimodular(const IntMat& u);

// Row-style Hermite normal form of an integer generator matrix: pivots
// positive, zeros below each pivot, entries above reduced into [0, pivot).
// Returns only the nonzero rows, so two generating sets span the same
// lattice iff their forms are equal.
IntMat hnf_rows(const IntMat& rows);

// Throws InvalidParameterError unless rows is a nonempty rectangular matrix
// with rank <= ambient dimension. Rank itself is checked by consumers.
void validate_shape(const RatMat& rows);

// Rational linear solver holding a factorization of the basis Gram matrix.
// Maps ambient points to exact coefficient vectors over the basis rows.
class CoeffSolver {
 public:
  explicit CoeffSolver(const RatMat& basis);

  // Coefficients c with sum_i c_i * b_i = orthogonal projection of point.
  RatVec rational_coefficients(const RatVec& point) const;

  // True, filling out, exactly when point = sum_i out_i * b_i with integer
  // coefficients (membership in the lattice itself, not just the span).
  bool integer_coefficients(const RatVec& point, IntVec& out) const;

  // Solves G x = rhs against the cached factorization.
  RatVec solve_gram(const RatVec& rhs) const;

  const RatMat& basis() const { return basis_; }

 private:
  RatMat basis_;
  RatMat lu_;
  std::vector<size_t> perm_;
};

}  // namespace latlab
