#include "latlab/lattice_core.hpp"

#include <numeric>

#include "latlab/error.hpp"

namespace latlab {

GramSchmidt gram_schmidt(const RatMat& basis) {
  validate_shape(basis);
  size_t n = basis.size();
  GramSchmidt gs;
  gs.gs_vectors.assign(n, RatVec());
  gs.mu.assign(n, RatVec(n, Rat(0)));
  gs.gs_sq_norms.assign(n, Rat(0));
  for (size_t i = 0; i < n; ++i) {
    RatVec v = basis[i];
    for (size_t j = 0; j < i; ++j) {
      Rat m = dot(basis[i], gs.gs_vectors[j]) / gs.gs_sq_norms[j];
      gs.mu[i][j] = m;
      if (sgn(m) != 0)
        for (size_t k = 0; k < v.size(); ++k) v[k] -= m * gs.gs_vectors[j][k];
    }
    gs.mu[i][i] = 1;
    gs.gs_sq_norms[i] = norm_sq(v);
    if (sgn(gs.gs_sq_norms[i]) == 0)
      throw DependentInputError("gram_schmidt: rows are linearly dependent");
    gs.gs_vectors[i] = std::move(v);
  }
  return gs;
}

namespace {

// Integer-arithmetic reduction state on the scaled Gram matrix. d[i] is the
// determinant of the leading i x i block of the current Gram matrix (d[0] =
// 1), lam[i][j] = d[j+1-scale] ... concretely lam[i][j] = mu_{i,j} * d[j+1]
// in 0-indexed terms, all exact integers throughout.
struct ReductionState {
  size_t n;
  std::vector<Int> d;            // size n + 1, d[0] = 1
  std::vector<std::vector<Int>> lam;  // lam[i][j] defined for j < i
  IntMat u;                      // current transform, rows are coefficients

  explicit ReductionState(const IntMat& a) : n(a.size()) {
    d.assign(n + 1, Int(0));
    d[0] = 1;
    lam.assign(n, std::vector<Int>(n, Int(0)));
    u = identity_int(n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j <= i; ++j) {
        Int v = a[i][j];
        for (size_t r = 0; r < j; ++r) {
          Int t = d[r + 1] * v - lam[i][r] * lam[j][r];
          mpz_divexact(v.get_mpz_t(), t.get_mpz_t(), d[r].get_mpz_t());
        }
        if (j < i) {
          lam[i][j] = v;
        } else {
          if (sgn(v) <= 0)
            throw DependentInputError("lll_reduce: rows are linearly dependent");
          d[i + 1] = v;
        }
      }
    }
  }

  // Size-reduce row k against row l (l < k), keeping |lam[k][l]| <= d[l+1]/2.
  void reduce(size_t k, size_t l) {
    Int two_lam = 2 * lam[k][l];
    if (mpz_cmpabs(two_lam.get_mpz_t(), d[l + 1].get_mpz_t()) <= 0) return;
    Int q;
    Int num = two_lam + d[l + 1];
    Int den = 2 * d[l + 1];
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    for (size_t j = 0; j < n; ++j) u[k][j] -= q * u[l][j];
    lam[k][l] -= q * d[l + 1];
    for (size_t i = 0; i < l; ++i) lam[k][i] -= q * lam[l][i];
  }

  // Exchange rows k and k-1 (k >= 1), updating the scaled data in place.
  void swap_rows(size_t k) {
    std::swap(u[k], u[k - 1]);
    for (size_t j = 0; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
    Int lambda = lam[k][k - 1];
    Int b = d[k - 1] * d[k + 1] + lambda * lambda;
    mpz_divexact(b.get_mpz_t(), b.get_mpz_t(), d[k].get_mpz_t());
    for (size_t i = k + 1; i < n; ++i) {
      Int t = lam[i][k];
      Int x = d[k + 1] * lam[i][k - 1] - lambda * t;
      mpz_divexact(lam[i][k].get_mpz_t(), x.get_mpz_t(), d[k].get_mpz_t());
      Int y = b * t + lambda * lam[i][k];
      mpz_divexact(lam[i][k - 1].get_mpz_t(), y.get_mpz_t(), d[k + 1].get_mpz_t());
    }
    d[k] = b;
  }

  // Exchange condition with parameter 3/4 in scaled integer form:
  // swap exactly when 4 (d[k+1] d[k-1] + lam[k][k-1]^2) < 3 d[k]^2.
  bool lovasz_fails(size_t k) const {
    Int lhs = 4 * (d[k + 1] * d[k - 1] + lam[k][k - 1] * lam[k][k - 1]);
    Int rhs = 3 * d[k] * d[k];
    return lhs < rhs;
  }
};

}  // namespace

LllResult lll_reduce(const RatMat& basis) {
  validate_shape(basis);
  size_t n = basis.size();
  RatMat q = gram_matrix(basis);
  // Scale the Gram matrix to integers by the lcm of all denominators.
  Int scale(1);
  for (const RatVec& row : q)
    for (const Rat& x : row) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), x.get_den_mpz_t());
  IntMat a(n, IntVec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Rat s = q[i][j] * Rat(scale);
      a[i][j] = s.get_num();  // denominator is 1 by construction
    }
  ReductionState st(a);
  size_t k = 1;
  while (k < n) {
    st.reduce(k, k - 1);
    if (st.lovasz_fails(k)) {
      st.swap_rows(k);
      k = k > 1 ? k - 1 : 1;
    } else {
      for (size_t l = k - 1; l-- > 0;) st.reduce(k, l);
      ++k;
    }
  }
  LllResult out;
  out.transform = std::move(st.u);
  out.basis = apply_transform(out.transform, basis);
  return out;
}

bool is_lll_reduced(const RatMat& basis) {
  GramSchmidt gs = gram_schmidt(basis);
  size_t n = basis.size();
  Rat half = make_rat(Int(1), Int(2));
  Rat three_quarters = make_rat(Int(3), Int(4));
  for (size_t i = 1; i < n; ++i) {
    for (size_t j = 0; j < i; ++j)
      if (abs(gs.mu[i][j]) > half) return false;
    Rat m = gs.mu[i][i - 1];
    if (gs.gs_sq_norms[i] < (three_quarters - m * m) * gs.gs_sq_norms[i - 1]) return false;
  }
  return true;
}

RatMat dual_basis(const RatMat& basis) {
  CoeffSolver solver(basis);
  size_t n = basis.size(), m = basis[0].size();
  RatMat dual(n, RatVec(m, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    RatVec e(n, Rat(0));
    e[i] = 1;
    RatVec c = solver.solve_gram(e);
    for (size_t k = 0; k < n; ++k) {
      if (sgn(c[k]) == 0) continue;
      for (size_t j = 0; j < m; ++j) dual[i][j] += c[k] * basis[k][j];
    }
  }
  return dual;
}

bool is_primitive(const RatMat& basis, const RatVec& point) {
  if (is_zero_vec(point)) throw ZeroVectorError("is_primitive: zero point");
  CoeffSolver solver(basis);
  IntVec c;
  if (!solver.integer_coefficients(point, c))
    throw NonMemberError("is_primitive: point is not in the lattice");
  Int g(0);
  for (const Int& x : c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g == 1;
}

namespace {

// Unimodular matrix whose first row is the given primitive vector, produced
// by running extended-gcd column steps on the vector while mirroring each
// step as the inverse row operation on an identity matrix.
IntMat unimodular_completion(IntVec c) {
  size_t n = c.size();
  IntMat m = identity_int(n);
  for (size_t i = 1; i < n; ++i) {
    while (sgn(c[i]) != 0) {
      if (sgn(c[0]) == 0) {
        std::swap(c[0], c[i]);
        std::swap(m[0], m[i]);
        continue;
      }
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), c[0].get_mpz_t(), c[i].get_mpz_t());
      // Column op c[0] -= q c[i] pairs with row op m[i] += q m[0].
      c[0] -= q * c[i];
      if (sgn(q) != 0)
        for (size_t j = 0; j < n; ++j) m[i][j] += q * m[0][j];
      std::swap(c[0], c[i]);
      std::swap(m[0], m[i]);
    }
  }
  if (sgn(c[0]) < 0) {
    c[0] = -c[0];
    for (size_t j = 0; j < n; ++j) m[0][j] = -m[0][j];
  }
  if (c[0] != 1)
    throw InvalidParameterError("unimodular_completion: coefficients are not coprime");
  return m;
}

}  // namespace

RatMat extend_to_basis(const RatMat& basis, const RatVec& vector) {
  if (is_zero_vec(vector)) throw ZeroVectorError("extend_to_basis: zero vector");
  CoeffSolver solver(basis);
  IntVec c;
  if (!solver.integer_coefficients(vector, c))
    throw NonMemberError("extend_to_basis: vector is not in the lattice");
  Int g(0);
  for (const Int& x : c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g != 1)
    for (Int& x : c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  IntMat u = unimodular_completion(c);
  return apply_transform(u, basis);
}

IndexWindow nearby_hyperplane_indices(const RatMat& basis, const RatVec& dual_first,
                                      const RatVec& target, const Rat& slack) {
  validate_shape(basis);
  for (size_t j = 0; j < basis.size(); ++j) {
    Rat p = dot(dual_first, basis[j]);
    if (p != (j == 0 ? Rat(1) : Rat(0)))
      throw InvalidParameterError("nearby_hyperplane_indices: dual_first does not pair to e_1");
  }
  Rat a = dot(dual_first, target);
  IndexWindow w;
  w.lo = floor_rat(a - slack);
  w.hi = ceil_rat(a + slack);
  return w;
}

Projection project_onto_span(const RatMat& sub_basis, const RatVec& point) {
  GramSchmidt gs = gram_schmidt(sub_basis);
  size_t n = sub_basis.size(), m = point.size();
  if (m != sub_basis[0].size())
    throw InvalidParameterError("project_onto_span: ambient dimension mismatch");
  // Coordinates along the orthogonalized directions, then back-substitution
  // to coefficients over the sub-basis rows.
  RatVec g(n);
  for (size_t j = 0; j < n; ++j) g[j] = dot(point, gs.gs_vectors[j]) / gs.gs_sq_norms[j];
  Projection pr;
  pr.span_coeffs.assign(n, Rat(0));
  for (size_t jj = n; jj-- > 0;) {
    Rat c = g[jj];
    for (size_t k = jj + 1; k < n; ++k) c -= pr.span_coeffs[k] * gs.mu[k][jj];
    pr.span_coeffs[jj] = c;
  }
  pr.ambient.assign(m, Rat(0));
  for (size_t j = 0; j < n; ++j) {
    if (sgn(g[j]) == 0) continue;
    for (size_t k = 0; k < m; ++k) pr.ambient[k] += g[j] * gs.gs_vectors[j][k];
  }
  pr.residual = vec_sub(point, pr.ambient);
  pr.residual_sq = norm_sq(pr.residual);
  return pr;
}

}  // namespace latlab
