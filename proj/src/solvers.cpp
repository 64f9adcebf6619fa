#include "latlab/solvers.hpp"

#include <algorithm>
#include <functional>

#include "latlab/error.hpp"

namespace latlab {

namespace {

constexpr long long kCoeffCap = 1ll << 40;

// Depth-first coefficient enumeration over the reduced basis, zig-zag order
// per level, non-strict pruning against a shrinkable squared radius so that
// ties are always visited. The leaf callback receives the coefficient vector
// over the reduced basis and the accumulated squared value (which includes
// the residual component for off-span targets); it may shrink the radius.
struct Enumeration {
  const GramSchmidt& gs;
  const RatVec& w;     // target coordinates along the orthogonalized rows
  Rat radius;          // current squared radius bound
  long long max_nodes;
  long long nodes = 0;
  std::vector<long long> a;
  std::function<void(const std::vector<long long>&, const Rat&, Rat&)> leaf;

  Enumeration(const GramSchmidt& g, const RatVec& coords, Rat radius_sq, long long budget)
      : gs(g), w(coords), radius(std::move(radius_sq)), max_nodes(budget),
        a(g.gs_sq_norms.size(), 0) {}

  void run(const Rat& res_sq) {
    size_t n = a.size();
    descend(n - 1, res_sq);
  }

  void descend(size_t j, const Rat& rho_above) {
    Rat s(0);
    size_t n = a.size();
    for (size_t i = j + 1; i < n; ++i)
      if (a[i] != 0) s += Rat(static_cast<long>(a[i])) * gs.mu[i][j];
    Rat c = w[j] - s;
    Int first_int = round_half_even(c);
    if (!first_int.fits_slong_p()) throw CapExceededError("enumeration: coefficient overflow");
    long long first = first_int.get_si();
    if (!try_value(j, first, c, rho_above)) return;
    long long lo = first - 1, hi = first + 1;
    bool lo_open = true, hi_open = true;
    while (lo_open || hi_open) {
      bool pick_hi;
      if (!lo_open) {
        pick_hi = true;
      } else if (!hi_open) {
        pick_hi = false;
      } else {
        Rat dl = c - Rat(static_cast<long>(lo));
        Rat dh = Rat(static_cast<long>(hi)) - c;
        pick_hi = dh <= dl;
      }
      if (pick_hi) {
        if (try_value(j, hi, c, rho_above)) {
          if (++hi > kCoeffCap) throw CapExceededError("enumeration: coefficient overflow");
        } else {
          hi_open = false;
        }
      } else {
        if (try_value(j, lo, c, rho_above)) {
          if (--lo < -kCoeffCap) throw CapExceededError("enumeration: coefficient overflow");
        } else {
          lo_open = false;
        }
      }
    }
  }

  bool try_value(size_t j, long long v, const Rat& c, const Rat& rho_above) {
    if (++nodes > max_nodes) throw BudgetExceededError("enumeration: node budget exceeded");
    Rat x = Rat(static_cast<long>(v)) - c;
    Rat rho = rho_above + x * x * gs.gs_sq_norms[j];
    if (rho > radius) return false;
    a[j] = v;
    if (j == 0)
      leaf(a, rho, radius);
    else
      descend(j - 1, rho);
    return true;
  }
};

bool all_zero(const std::vector<long long>& a) {
  for (long long v : a)
    if (v != 0) return false;
  return true;
}

IntVec to_int_vec(const std::vector<long long>& a) {
  IntVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = Int(static_cast<long>(a[i]));
  return r;
}

}  // namespace

PreparedLattice::PreparedLattice(const RatMat& basis, EnumerationBudget budget)
    : original_(basis), budget_(std::move(budget)) {
  validate_shape(original_);
  if (original_.size() > budget_.rank_cap)
    throw InvalidParameterError("PreparedLattice: rank exceeds the desk-scale cap");
  LllResult lll = lll_reduce(original_);
  reduced_ = std::move(lll.basis);
  transform_ = std::move(lll.transform);
  gs_ = gram_schmidt(reduced_);
}

namespace {

// Coefficients over the original basis: reduced coefficients times the
// reduction transform.
IntVec original_coeffs(const IntMat& transform, const std::vector<long long>& a) {
  size_t n = transform.size();
  IntVec o(n, Int(0));
  for (size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    Int f(static_cast<long>(a[i]));
    for (size_t k = 0; k < n; ++k) o[k] += f * transform[i][k];
  }
  return o;
}

IntVec original_coeffs(const IntMat& transform, const IntVec& a) {
  size_t n = transform.size();
  IntVec o(n, Int(0));
  for (size_t i = 0; i < n; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (size_t k = 0; k < n; ++k) o[k] += a[i] * transform[i][k];
  }
  return o;
}

RatVec point_from_coeffs(const RatMat& basis, const IntVec& o) {
  RatVec p(basis[0].size(), Rat(0));
  for (size_t i = 0; i < basis.size(); ++i) {
    if (sgn(o[i]) == 0) continue;
    Rat f(o[i]);
    for (size_t j = 0; j < p.size(); ++j) p[j] += f * basis[i][j];
  }
  return p;
}

// Target's coordinates along the orthogonalized rows plus the squared
// residual orthogonal to the span.
RatVec target_coords(const GramSchmidt& gs, const RatVec& t, Rat& res_sq_out) {
  size_t n = gs.gs_sq_norms.size();
  RatVec w(n);
  RatVec proj(t.size(), Rat(0));
  for (size_t j = 0; j < n; ++j) {
    w[j] = dot(t, gs.gs_vectors[j]) / gs.gs_sq_norms[j];
    if (sgn(w[j]) != 0)
      for (size_t k = 0; k < t.size(); ++k) proj[k] += w[j] * gs.gs_vectors[j][k];
  }
  res_sq_out = norm_sq(vec_sub(t, proj));
  return w;
}

}  // namespace

LatticePoint PreparedLattice::shortest() const {
  size_t n = rank();
  Rat radius = norm_sq(reduced_[0]);
  for (size_t i = 1; i < n; ++i) radius = std::min(radius, norm_sq(reduced_[i]));
  RatVec w(n, Rat(0));
  Enumeration en(gs_, w, radius, budget_.max_nodes);
  bool have = false;
  Rat best_sq;
  IntVec best_coeffs;
  en.leaf = [&](const std::vector<long long>& a, const Rat& rho, Rat& rad) {
    if (all_zero(a)) return;
    if (have && rho > best_sq) return;
    IntVec o = original_coeffs(transform_, a);
    if (!have || rho < best_sq || lex_less(o, best_coeffs)) {
      have = true;
      best_sq = rho;
      best_coeffs = std::move(o);
      rad = rho;
    }
  };
  en.run(Rat(0));
  nodes_used_ = en.nodes;
  if (!have) throw ZeroVectorError("shortest: no nonzero vector found");
  LatticePoint p;
  p.coeffs = std::move(best_coeffs);
  p.coords = point_from_coeffs(original_, p.coeffs);
  p.norm_sq = std::move(best_sq);
  return p;
}

ClosestResult PreparedLattice::babai(const RatVec& target) const {
  if (target.size() != ambient_dim())
    throw InvalidParameterError("babai: ambient dimension mismatch");
  size_t n = rank();
  Rat res_sq;
  RatVec w = target_coords(gs_, target, res_sq);
  /* A single rounding pass, so far-away targets are fine: coefficients grow
   * with the target, never combinatorially, and stay exact. */
  IntVec a(n, Int(0));
  Rat rho = res_sq;
  for (size_t jj = n; jj-- > 0;) {
    Rat s(0);
    for (size_t i = jj + 1; i < n; ++i)
      if (sgn(a[i]) != 0) s += Rat(a[i]) * gs_.mu[i][jj];
    Rat c = w[jj] - s;
    a[jj] = round_half_even(c);
    Rat x = Rat(a[jj]) - c;
    rho += x * x * gs_.gs_sq_norms[jj];
  }
  ClosestResult r;
  r.point.coeffs = original_coeffs(transform_, a);
  r.point.coords = point_from_coeffs(original_, r.point.coeffs);
  r.point.norm_sq = norm_sq(r.point.coords);
  r.dist_sq = std::move(rho);
  return r;
}

ClosestResult PreparedLattice::closest(const RatVec& target) const {
  if (target.size() != ambient_dim())
    throw InvalidParameterError("closest: ambient dimension mismatch");
  Rat res_sq;
  RatVec w = target_coords(gs_, target, res_sq);
  Rat radius = babai(target).dist_sq;
  Enumeration en(gs_, w, radius, budget_.max_nodes);
  bool have = false;
  Rat best_sq;
  IntVec best_coeffs;
  en.leaf = [&](const std::vector<long long>& a, const Rat& rho, Rat& rad) {
    if (have && rho > best_sq) return;
    IntVec o = original_coeffs(transform_, a);
    if (!have || rho < best_sq || lex_less(o, best_coeffs)) {
      have = true;
      best_sq = rho;
      best_coeffs = std::move(o);
      rad = rho;
    }
  };
  en.run(res_sq);
  nodes_used_ = en.nodes;
  ClosestResult r;
  r.point.coeffs = std::move(best_coeffs);
  r.point.coords = point_from_coeffs(original_, r.point.coeffs);
  r.point.norm_sq = norm_sq(r.point.coords);
  r.dist_sq = std::move(best_sq);
  return r;
}

Rat PreparedLattice::second_minimum() const {
  size_t n = rank();
  if (n < 2) throw InvalidParameterError("second_minimum: rank-1 lattice");
  LatticePoint v1 = shortest();
  // lambda_2 <= max of the first two reduced row lengths.
  Rat radius = std::max(norm_sq(reduced_[0]), norm_sq(reduced_[1]));
  RatVec w(n, Rat(0));
  Enumeration en(gs_, w, radius, budget_.max_nodes);
  bool have = false;
  Rat best_sq;
  en.leaf = [&](const std::vector<long long>& a, const Rat& rho, Rat& rad) {
    if (all_zero(a)) return;
    if (have && rho >= best_sq) return;
    IntVec o = original_coeffs(transform_, a);
    if (parallel(o, v1.coeffs)) return;
    have = true;
    best_sq = rho;
    rad = rho;
  };
  en.run(Rat(0));
  nodes_used_ = en.nodes;
  if (!have) throw Error("second_minimum: no independent vector within bound");
  return best_sq;
}

std::vector<LatticePoint> PreparedLattice::points_in_ball(const Rat& radius_sq,
                                                          bool include_zero) const {
  if (sgn(radius_sq) < 0) throw InvalidParameterError("points_in_ball: negative radius");
  if (sgn(budget_.radius_bound_sq) >= 0 && radius_sq > budget_.radius_bound_sq)
    throw BudgetExceededError("points_in_ball: radius above the configured ceiling");
  size_t n = rank();
  RatVec w(n, Rat(0));
  Enumeration en(gs_, w, radius_sq, budget_.max_nodes);
  std::vector<LatticePoint> out;
  en.leaf = [&](const std::vector<long long>& a, const Rat& rho, Rat&) {
    if (!include_zero && all_zero(a)) return;
    if (static_cast<long long>(out.size()) >= budget_.max_points)
      throw BudgetExceededError("points_in_ball: point budget exceeded");
    LatticePoint p;
    p.coeffs = original_coeffs(transform_, a);
    p.coords = point_from_coeffs(original_, p.coeffs);
    p.norm_sq = rho;
    out.push_back(std::move(p));
  };
  en.run(Rat(0));
  nodes_used_ = en.nodes;
  std::sort(out.begin(), out.end(), [](const LatticePoint& x, const LatticePoint& y) {
    int c = cmp(x.norm_sq, y.norm_sq);
    if (c != 0) return c < 0;
    return lex_less(x.coeffs, y.coeffs);
  });
  return out;
}

PrimitiveCount PreparedLattice::primitive_count(const Rat& radius_sq) const {
  if (sgn(radius_sq) < 0) throw InvalidParameterError("primitive_count: negative radius");
  size_t n = rank();
  RatVec w(n, Rat(0));
  Enumeration en(gs_, w, radius_sq, budget_.max_nodes);
  Int count(0);
  en.leaf = [&](const std::vector<long long>& a, const Rat&, Rat&) {
    if (all_zero(a)) return;
    // Count each pair {x, -x} once via the sign of the leading coefficient;
    // the gcd of the coefficient vector is basis-independent.
    IntVec ia = to_int_vec(a);
    if (!lex_positive(ia)) return;
    Int g(0);
    for (const Int& x : ia) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 1) ++count;
  };
  en.run(Rat(0));
  nodes_used_ = en.nodes;
  PrimitiveCount pc;
  pc.radius_sq = radius_sq;
  pc.count = std::move(count);
  return pc;
}

Rat PreparedLattice::min_gs_sq() const {
  Rat m = gs_.gs_sq_norms[0];
  for (size_t i = 1; i < gs_.gs_sq_norms.size(); ++i) m = std::min(m, gs_.gs_sq_norms[i]);
  return m;
}

LatticePoint svp_exact(const RatMat& basis) { return PreparedLattice(basis).shortest(); }

LatticePoint cvp_exact(const RatMat& basis, const RatVec& target) {
  return PreparedLattice(basis).closest(target).point;
}

Rat lambda2(const RatMat& basis) { return PreparedLattice(basis).second_minimum(); }

PrimitiveCount count_primitive(const RatMat& basis, const Rat& radius_sq) {
  return PreparedLattice(basis).primitive_count(radius_sq);
}

bool verify_point_count_bound(const RatMat& basis, const Rat& r_multiplier) {
  if (r_multiplier < 1)
    throw InvalidParameterError("verify_point_count_bound: multiplier must be >= 1");
  PreparedLattice prep(basis);
  Rat lambda1_sq = prep.shortest().norm_sq;
  Rat radius_sq = r_multiplier * r_multiplier * lambda1_sq;
  size_t n = prep.rank();
  RatVec w(n, Rat(0));
  Enumeration en(prep.gs(), w, radius_sq, EnumerationBudget{}.max_nodes);
  Int count(0);
  en.leaf = [&](const std::vector<long long>&, const Rat&, Rat&) { ++count; };
  en.run(Rat(0));
  Int bound = 2 * pow_int(ceil_rat(2 * r_multiplier), static_cast<unsigned long>(n)) - 1;
  return count <= bound;
}

}  // namespace latlab
