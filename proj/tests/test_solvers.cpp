#include <doctest.h>

#include "latlab/error.hpp"
#include "latlab/prng.hpp"
#include "latlab/solvers.hpp"

using namespace latlab;

namespace {

RatMat identity_rat(size_t n) { return rat_mat(identity_int(n)); }

RatMat pseudo_random_basis(size_t n, size_t m, uint64_t seed) {
  SplitMix64 g(seed);
  for (;;) {
    RatMat b(n, RatVec(m));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < m; ++j)
        b[i][j] = Rat(static_cast<long>(uniform_below(g, 15)) - 7);
    try {
      gram_schmidt(b);
      return b;
    } catch (const DependentInputError&) {
      continue;
    }
  }
}

// Independent oracle: direct box search over coefficient vectors. Bounds the
// coefficients crudely; only usable at tiny rank.
Rat brute_force_min_sq(const RatMat& basis, const RatVec& target, int box) {
  size_t n = basis.size();
  std::vector<int> a(n, -box);
  bool have = false;
  Rat best(0);
  for (;;) {
    RatVec p(basis[0].size(), Rat(0));
    bool zero = true;
    for (size_t i = 0; i < n; ++i) {
      if (a[i] != 0) zero = false;
      for (size_t j = 0; j < p.size(); ++j) p[j] += Rat(static_cast<long>(a[i])) * basis[i][j];
    }
    bool skip = target.empty() && zero;
    if (!skip) {
      Rat d = target.empty() ? norm_sq(p) : norm_sq(vec_sub(p, target));
      if (!have || d < best) {
        have = true;
        best = d;
      }
    }
    size_t k = 0;
    while (k < n && a[k] == box) a[k++] = -box;
    if (k == n) break;
    ++a[k];
  }
  return best;
}

}  // namespace

TEST_CASE("svp_exact on simple lattices") {
  LatticePoint p = svp_exact(identity_rat(3));
  CHECK(p.norm_sq == Rat(1));
  CHECK(p.coeffs == IntVec{Int(-1), Int(0), Int(0)});  // lex-least tie winner

  RatMat b = {{Rat(2), Rat(0)}, {Rat(1), Rat(2)}};
  CHECK(svp_exact(b).norm_sq == Rat(4));

  // Scaling the lattice scales lambda_1 quadratically.
  RatMat b3 = {{Rat(6), Rat(0)}, {Rat(3), Rat(6)}};
  CHECK(svp_exact(b3).norm_sq == Rat(36));
}

TEST_CASE("svp_exact matches brute force on pseudo-random bases") {
  for (uint64_t seed : {21u, 22u, 23u, 24u}) {
    RatMat b = pseudo_random_basis(3, 3, seed);
    LatticePoint p = svp_exact(b);
    CHECK(p.norm_sq == brute_force_min_sq(b, {}, 6));
    CHECK(norm_sq(p.coords) == p.norm_sq);
    CHECK(is_primitive(b, p.coords));  // shortest vectors are primitive
  }
}

TEST_CASE("cvp_exact on simple cases") {
  RatMat z2 = identity_rat(2);
  RatVec inside = {Rat(3), Rat(-2)};
  LatticePoint hit = cvp_exact(z2, inside);
  CHECK(hit.coords == inside);

  RatVec t = {make_rat(Int(2), Int(5)), make_rat(Int(2), Int(5))};
  ClosestResult c = PreparedLattice(z2).closest(t);
  CHECK(c.point.coords == RatVec{Rat(0), Rat(0)});
  CHECK(c.dist_sq == make_rat(Int(8), Int(25)));
}

TEST_CASE("cvp_exact matches brute force and translation invariance") {
  for (uint64_t seed : {31u, 32u, 33u}) {
    RatMat b = pseudo_random_basis(3, 3, seed);
    SplitMix64 g(seed * 1000);
    RatVec t(3);
    for (size_t j = 0; j < 3; ++j)
      t[j] = make_rat(Int(static_cast<long>(uniform_below(g, 41)) - 20), Int(7));
    ClosestResult c = PreparedLattice(b).closest(t);
    CHECK(c.dist_sq == brute_force_min_sq(b, t, 8));
    CHECK(c.dist_sq == norm_sq(vec_sub(c.point.coords, t)));
    // Translating the target by a lattice vector translates the answer.
    RatVec shift = b[0];
    ClosestResult c2 = PreparedLattice(b).closest(vec_add(t, shift));
    CHECK(c2.dist_sq == c.dist_sq);
    CHECK(vec_sub(c2.point.coords, shift) == c.point.coords);
  }
}

TEST_CASE("babai distance bounds the exact distance") {
  for (uint64_t seed : {41u, 42u}) {
    RatMat b = pseudo_random_basis(4, 4, seed);
    PreparedLattice prep(b);
    SplitMix64 g(seed);
    RatVec t(4);
    for (size_t j = 0; j < 4; ++j)
      t[j] = make_rat(Int(static_cast<long>(uniform_below(g, 19)) - 9), Int(4));
    ClosestResult nb = prep.babai(t);
    ClosestResult ex = prep.closest(t);
    CHECK(nb.dist_sq >= ex.dist_sq);
    CHECK(norm_sq(vec_sub(nb.point.coords, t)) == nb.dist_sq);
  }
}

TEST_CASE("lambda2 on diagonal and skew lattices") {
  CHECK(lambda2(identity_rat(2)) == Rat(1));
  CHECK(lambda2(RatMat{{Rat(1), Rat(0)}, {Rat(0), Rat(3)}}) == Rat(9));
  RatMat skew = {{Rat(1), Rat(0)}, {make_rat(Int(1), Int(2)), Rat(10)}};
  Rat l2 = lambda2(skew);
  CHECK(svp_exact(skew).norm_sq == Rat(1));
  CHECK(l2 >= Rat(1));
  // Brute confirmation: shortest independent candidate is (1/2, 10).
  CHECK(l2 == make_rat(Int(401), Int(4)));
  CHECK_THROWS_AS(lambda2(RatMat{{Rat(2)}}), InvalidParameterError);
}

TEST_CASE("lambda2 ignores parallel multiples of the shortest vector") {
  // lambda_1 = 1 via e_1; 2 e_1 is shorter than the independent (1/2, 3/2).
  RatMat b = {{Rat(1), Rat(0)}, {make_rat(Int(1), Int(2)), make_rat(Int(3), Int(2))}};
  CHECK(svp_exact(b).norm_sq == Rat(1));
  CHECK(lambda2(b) == make_rat(Int(5), Int(2)));  // |(1/2,3/2)|^2 = 10/4
}

TEST_CASE("points_in_ball is complete, sorted, and exact") {
  RatMat z2 = identity_rat(2);
  PreparedLattice prep(z2);
  std::vector<LatticePoint> pts = prep.points_in_ball(Rat(2), true);
  CHECK(pts.size() == 9);  // (0,0), 4 units, 4 diagonals
  CHECK(pts[0].norm_sq == Rat(0));
  std::vector<LatticePoint> nz = prep.points_in_ball(Rat(2), false);
  CHECK(nz.size() == 8);
  for (size_t i = 1; i < nz.size(); ++i) CHECK(nz[i - 1].norm_sq <= nz[i].norm_sq);
  // Ties are ordered by coefficient vector.
  CHECK(nz[0].coeffs == IntVec{Int(-1), Int(0)});
  CHECK(nz[1].coeffs == IntVec{Int(0), Int(-1)});
  CHECK(nz[2].coeffs == IntVec{Int(0), Int(1)});
  CHECK(nz[3].coeffs == IntVec{Int(1), Int(0)});
}

TEST_CASE("count_primitive matches the hand counts") {
  RatMat z2 = identity_rat(2);
  CHECK(count_primitive(z2, Rat(1)).count == 2);
  CHECK(count_primitive(z2, Rat(2)).count == 4);
  CHECK(count_primitive(z2, Rat(5)).count == 8);
  // Monotone in the radius.
  Int last(0);
  for (long r = 0; r <= 9; ++r) {
    Int c = count_primitive(z2, Rat(r)).count;
    CHECK(c >= last);
    last = c;
  }
}

TEST_CASE("count_primitive is basis-invariant") {
  RatMat z2 = identity_rat(2);
  RatMat other = {{Rat(3), Rat(1)}, {Rat(2), Rat(1)}};  // also a basis of Z^2
  REQUIRE(det_rat(other) == Rat(1));
  for (long r : {1, 2, 5, 10})
    CHECK(count_primitive(z2, Rat(r)).count == count_primitive(other, Rat(r)).count);
}

TEST_CASE("verify_point_count_bound on spec cases and corpus-like bases") {
  CHECK(verify_point_count_bound(identity_rat(2), Rat(1)));
  CHECK(verify_point_count_bound(identity_rat(1), Rat(1)));
  CHECK(verify_point_count_bound(identity_rat(4), make_rat(Int(3), Int(2))));
  for (uint64_t seed : {51u, 52u})
    CHECK(verify_point_count_bound(pseudo_random_basis(3, 3, seed), Rat(2)));
  CHECK_THROWS_AS(verify_point_count_bound(identity_rat(2), make_rat(Int(1), Int(2))),
                  InvalidParameterError);
}

TEST_CASE("enumeration budget errors are raised, not ignored") {
  EnumerationBudget tiny;
  tiny.max_nodes = 3;
  PreparedLattice prep(identity_rat(4), tiny);
  CHECK_THROWS_AS(prep.shortest(), BudgetExceededError);

  EnumerationBudget fewpts;
  fewpts.max_points = 2;
  PreparedLattice prep2(identity_rat(3), fewpts);
  CHECK_THROWS_AS(prep2.points_in_ball(Rat(4), false), BudgetExceededError);

  EnumerationBudget ceiling;
  ceiling.radius_bound_sq = Rat(10);
  PreparedLattice prep3(identity_rat(2), ceiling);
  CHECK_THROWS_AS(prep3.points_in_ball(Rat(11), false), BudgetExceededError);
  CHECK(prep3.points_in_ball(Rat(10), false).size() > 0);

  EnumerationBudget cap;
  CHECK_THROWS_AS(PreparedLattice(identity_rat(13), cap), InvalidParameterError);
}

TEST_CASE("reduced-basis coefficient growth bound holds in enumerated balls") {
  // For an LLL-reduced basis and |y| <= 3 lambda_1: |a_i| <= 2^{3n/2-i} |y| / lambda_1.
  for (uint64_t seed : {61u, 62u}) {
    RatMat b = lll_reduce(pseudo_random_basis(3, 3, seed)).basis;
    PreparedLattice prep(b);
    Rat l1_sq = prep.shortest().norm_sq;
    size_t n = b.size();
    for (const LatticePoint& y : prep.points_in_ball(Rat(9) * l1_sq, false)) {
      for (size_t k = 0; k < n; ++k) {
        // Squared, 1-indexed exponent: a_i^2 lambda_1^2 <= 2^{3n-2i} |y|^2.
        Rat lhs = Rat(y.coeffs[k]) * Rat(y.coeffs[k]) * l1_sq;
        unsigned long e = 3 * n - 2 * (k + 1);
        CHECK(lhs <= pow_rat(Rat(2), e) * y.norm_sq);
      }
    }
  }
}

TEST_CASE("covering radius bounds via sampled targets") {
  // dist(t, L)^2 <= n 2^{n-2} |b~_n|^2 and dist^2 * lambda_1(dual)^2 <= n^2/4
  // for targets sampled in the fundamental parallelepiped.
  for (uint64_t seed : {71u, 72u}) {
    RatMat b = lll_reduce(pseudo_random_basis(3, 3, seed)).basis;
    PreparedLattice prep(b);
    GramSchmidt gs = gram_schmidt(b);
    size_t n = b.size();
    Rat gs_last = gs.gs_sq_norms[n - 1];
    Rat dual_l1_sq = svp_exact(dual_basis(b)).norm_sq;
    SplitMix64 g(seed);
    for (int trial = 0; trial < 200; ++trial) {
      RatVec t(b[0].size(), Rat(0));
      for (size_t i = 0; i < n; ++i) {
        Rat c = make_rat(Int(static_cast<long>(uniform_below(g, 1024))), Int(1024));
        for (size_t j = 0; j < t.size(); ++j) t[j] += c * b[i][j];
      }
      Rat d_sq = prep.closest(t).dist_sq;
      CHECK(d_sq <= Rat(static_cast<long>(n)) * pow_rat(Rat(2), n - 2) * gs_last);
      CHECK(d_sq * dual_l1_sq <= make_rat(Int(static_cast<long>(n * n)), Int(4)));
    }
  }
}
