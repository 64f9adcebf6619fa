#include "latlab/basis.hpp"

#include "latlab/error.hpp"

namespace latlab {

RatMat rat_mat(const IntMat& m) {
  RatMat r(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    r[i].resize(m[i].size());
    for (size_t j = 0; j < m[i].size(); ++j) r[i][j] = Rat(m[i][j]);
  }
  return r;
}

IntMat identity_int(size_t n) {
  IntMat u(n, IntVec(n, Int(0)));
  for (size_t i = 0; i < n; ++i) u[i][i] = 1;
  return u;
}

RatMat mat_mul(const RatMat& a, const RatMat& b) {
  if (a.empty() || b.empty() || a[0].size() != b.size())
    throw InvalidParameterError("mat_mul: dimension mismatch");
  size_t n = a.size(), k = b.size(), m = b[0].size();
  RatMat r(n, RatVec(m, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (sgn(a[i][l]) == 0) continue;
      for (size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
    }
  return r;
}

IntMat mat_mul_int(const IntMat& a, const IntMat& b) {
  if (a.empty() || b.empty() || a[0].size() != b.size())
    throw InvalidParameterError("mat_mul_int: dimension mismatch");
  size_t n = a.size(), k = b.size(), m = b[0].size();
  IntMat r(n, IntVec(m, Int(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (sgn(a[i][l]) == 0) continue;
      for (size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
    }
  return r;
}

RatMat transpose(const RatMat& a) {
  if (a.empty()) return {};
  RatMat r(a[0].size(), RatVec(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
  return r;
}

RatMat apply_transform(const IntMat& u, const RatMat& basis) {
  if (u.empty() || basis.empty() || u[0].size() != basis.size())
    throw InvalidParameterError("apply_transform: dimension mismatch");
  size_t n = u.size(), k = basis.size(), m = basis[0].size();
  RatMat r(n, RatVec(m, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (sgn(u[i][l]) == 0) continue;
      Rat c(u[i][l]);
      for (size_t j = 0; j < m; ++j) r[i][j] += c * basis[l][j];
    }
  return r;
}

RatMat gram_matrix(const RatMat& basis) {
  validate_shape(basis);
  size_t n = basis.size();
  RatMat g(n, RatVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j <= i; ++j) {
      g[i][j] = dot(basis[i], basis[j]);
      g[j][i] = g[i][j];
    }
  return g;
}

Rat det_rat(RatMat a) {
  size_t n = a.size();
  if (n == 0 || a[0].size() != n) throw InvalidParameterError("det_rat: square matrix required");
  Rat det(1);
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && sgn(a[piv][c]) == 0) ++piv;
    if (piv == n) return Rat(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (sgn(a[r][c]) == 0) continue;
      Rat f = a[r][c] / a[c][c];
      for (size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

Int det_int(IntMat a) {
  // Bareiss fraction-free elimination.
  size_t n = a.size();
  if (n == 0 || a[0].size() != n) throw InvalidParameterError("det_int: square matrix required");
  Int prev(1);
  int sign = 1;
  for (size_t c = 0; c + 1 < n; ++c) {
    size_t piv = c;
    while (piv < n && sgn(a[piv][c]) == 0) ++piv;
    if (piv == n) return Int(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      sign = -sign;
    }
    for (size_t r = c + 1; r < n; ++r) {
      for (size_t j = c + 1; j < n; ++j) {
        Int t = a[r][j] * a[c][c] - a[r][c] * a[c][j];
        mpz_divexact(a[r][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[r][c] = 0;
    }
    prev = a[c][c];
  }
  return sign > 0 ? a[n - 1][n - 1] : Int(-a[n - 1][n - 1]);
}

bool is_unimodular(const IntMat& u) {
  if (u.empty() || u[0].size() != u.size()) return false;
  Int d = det_int(u);
  return d == 1 || d == -1;
}

IntMat hnf_rows(const IntMat& rows) {
  if (rows.empty()) return {};
  size_t m = rows[0].size();
  for (const IntVec& r : rows)
    if (r.size() != m) throw InvalidParameterError("hnf_rows: ragged input");
  IntMat a = rows;
  size_t r = 0;
  for (size_t col = 0; col < m && r < a.size(); ++col) {
    // Eliminate below position r in this column by repeated gcd steps.
    for (;;) {
      size_t best = a.size();
      for (size_t i = r; i < a.size(); ++i) {
        if (sgn(a[i][col]) == 0) continue;
        if (best == a.size() ||
            mpz_cmpabs(a[i][col].get_mpz_t(), a[best][col].get_mpz_t()) < 0)
          best = i;
      }
      if (best == a.size()) break;  // column clear below r
      std::swap(a[r], a[best]);
      bool clear = true;
      for (size_t i = r + 1; i < a.size(); ++i) {
        if (sgn(a[i][col]) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[r][col].get_mpz_t());
        for (size_t j = 0; j < m; ++j) a[i][j] -= q * a[r][j];
        if (sgn(a[i][col]) != 0) clear = false;
      }
      if (clear) {
        if (sgn(a[r][col]) < 0)
          for (size_t j = 0; j < m; ++j) a[r][j] = -a[r][j];
        for (size_t i = 0; i < r; ++i) {
          Int q;
          mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[r][col].get_mpz_t());
          if (sgn(q) == 0) continue;
          for (size_t j = 0; j < m; ++j) a[i][j] -= q * a[r][j];
        }
        ++r;
        break;
      }
    }
  }
  a.resize(r);
  return a;
}

void validate_shape(const RatMat& rows) {
  if (rows.empty()) throw InvalidParameterError("basis: empty");
  size_t m = rows[0].size();
  if (m == 0) throw InvalidParameterError("basis: zero ambient dimension");
  for (const RatVec& row : rows)
    if (row.size() != m) throw InvalidParameterError("basis: ragged rows");
  if (rows.size() > m) throw InvalidParameterError("basis: more rows than ambient dimension");
}

CoeffSolver::CoeffSolver(const RatMat& basis) : basis_(basis) {
  validate_shape(basis_);
  lu_ = gram_matrix(basis_);
  size_t n = lu_.size();
  perm_.resize(n);
  for (size_t i = 0; i < n; ++i) perm_[i] = i;
  // In-place LU with partial (first nonzero) pivoting.
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && sgn(lu_[piv][c]) == 0) ++piv;
    if (piv == n) throw DependentInputError("basis rows are linearly dependent");
    if (piv != c) {
      std::swap(lu_[piv], lu_[c]);
      std::swap(perm_[piv], perm_[c]);
    }
    for (size_t r = c + 1; r < n; ++r) {
      if (sgn(lu_[r][c]) == 0) continue;
      Rat f = lu_[r][c] / lu_[c][c];
      lu_[r][c] = f;
      for (size_t j = c + 1; j < n; ++j) lu_[r][j] -= f * lu_[c][j];
    }
  }
}

RatVec CoeffSolver::solve_gram(const RatVec& rhs) const {
  size_t n = lu_.size();
  if (rhs.size() != n) throw InvalidParameterError("solve_gram: dimension mismatch");
  RatVec y(n);
  for (size_t i = 0; i < n; ++i) {
    Rat s = rhs[perm_[i]];
    for (size_t j = 0; j < i; ++j) s -= lu_[i][j] * y[j];
    y[i] = s;
  }
  RatVec x(n);
  for (size_t ii = n; ii-- > 0;) {
    Rat s = y[ii];
    for (size_t j = ii + 1; j < n; ++j) s -= lu_[ii][j] * x[j];
    x[ii] = s / lu_[ii][ii];
  }
  return x;
}

RatVec CoeffSolver::rational_coefficients(const RatVec& point) const {
  if (point.size() != basis_[0].size())
    throw InvalidParameterError("rational_coefficients: ambient dimension mismatch");
  size_t n = basis_.size();
  RatVec rhs(n);
  for (size_t i = 0; i < n; ++i) rhs[i] = dot(basis_[i], point);
  return solve_gram(rhs);
}

bool CoeffSolver::integer_coefficients(const RatVec& point, IntVec& out) const {
  RatVec c = rational_coefficients(point);
  size_t n = c.size();
  IntVec ic(n);
  for (size_t i = 0; i < n; ++i) {
    if (c[i].get_den() != 1) return false;
    ic[i] = c[i].get_num();
  }
  // The span projection must also reproduce the point exactly.
  RatVec rec(point.size(), Rat(0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < point.size(); ++j) rec[j] += c[i] * basis_[i][j];
  for (size_t j = 0; j < point.size(); ++j)
    if (rec[j] != point[j]) return false;
  out = std::move(ic);
  return true;
}

}  // namespace latlab
