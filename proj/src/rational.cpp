#include "latlab/rational.hpp"

#include <sstream>

#include "latlab/error.hpp"

namespace latlab {

Rat make_rat(const Int& num, const Int& den) {
  if (sgn(den) == 0) throw InvalidParameterError("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Int floor_rat(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

Int ceil_rat(const Rat& x) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

Int round_half_even(const Rat& x) {
  Int f = floor_rat(x);
  // r = 2*(x - f) compared with 1: below -> f, above -> f+1, equal -> even.
  Rat r = (x - Rat(f)) * 2;
  int c = cmp(r, Rat(1));
  if (c < 0) return f;
  if (c > 0) return f + 1;
  return mpz_even_p(f.get_mpz_t()) ? f : f + 1;
}

Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Rat pow_rat(const Rat& base, unsigned long e) {
  // num/den already coprime, so the power is canonical.
  Rat r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(base.get_mpq_t()), e);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(base.get_mpq_t()), e);
  return r;
}

bool le_scaled_pow(const Rat& x_sq, const Rat& gamma, unsigned long p,
                   unsigned long q, const Rat& y_sq) {
  if (sgn(y_sq) <= 0) throw InvalidParameterError("le_scaled_pow: y_sq must be positive");
  if (sgn(x_sq) < 0) throw InvalidParameterError("le_scaled_pow: x_sq must be nonnegative");
  if (sgn(gamma) <= 0) throw InvalidParameterError("le_scaled_pow: gamma must be positive");
  if (q == 0) throw InvalidParameterError("le_scaled_pow: q must be >= 1");
  // x_sq^q <= gamma^{2p} * y_sq^q, all exact.
  Rat lhs = pow_rat(x_sq, q);
  Rat rhs = pow_rat(gamma, 2 * p) * pow_rat(y_sq, q);
  return lhs <= rhs;
}

Rat dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw InvalidParameterError("dot: dimension mismatch");
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rat norm_sq(const RatVec& a) {
  Rat s = 0;
  for (const Rat& x : a) s += x * x;
  return s;
}

RatVec vec_add(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw InvalidParameterError("vec_add: dimension mismatch");
  RatVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RatVec vec_sub(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw InvalidParameterError("vec_sub: dimension mismatch");
  RatVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RatVec vec_scale(const RatVec& a, const Rat& c) {
  RatVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

bool is_zero_vec(const RatVec& a) {
  for (const Rat& x : a)
    if (sgn(x) != 0) return false;
  return true;
}

bool lex_less(const IntVec& a, const IntVec& b) {
  size_t n = a.size() < b.size() ? a.size() : b.size();
  for (size_t i = 0; i < n; ++i) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

IntVec vec_neg(const IntVec& a) {
  IntVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

bool lex_positive(const IntVec& a) {
  for (const Int& x : a) {
    int s = sgn(x);
    if (s != 0) return s > 0;
  }
  return false;
}

IntVec canonical_sign(const IntVec& a) {
  for (const Int& x : a) {
    int s = sgn(x);
    if (s > 0) return a;
    if (s < 0) return vec_neg(a);
  }
  return a;
}

bool lex_less_rat(const RatVec& a, const RatVec& b) {
  size_t n = a.size() < b.size() ? a.size() : b.size();
  for (size_t i = 0; i < n; ++i) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

bool parallel(const IntVec& u, const IntVec& v) {
  if (u.size() != v.size()) throw InvalidParameterError("parallel: dimension mismatch");
  // u || v iff all 2x2 minors vanish.
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j)
      if (u[i] * v[j] != u[j] * v[i]) return false;
  return true;
}

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational");
  std::string::size_type slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      // Accept a plain integer or a decimal like "1.05" (kept exact).
      std::string::size_type dotpos = s.find('.');
      if (dotpos == std::string::npos) {
        Rat r{Int(s)};
        return r;
      }
      std::string head = s.substr(0, dotpos);
      std::string frac = s.substr(dotpos + 1);
      if (frac.empty()) frac = "0";
      for (char c : frac)
        if (c < '0' || c > '9') throw ParseError("malformed decimal: " + s);
      bool negative = !head.empty() && head[0] == '-';
      if (head == "-" || head.empty()) head = negative ? "-0" : "0";
      Int ipart(head);
      Int digits(frac);
      Int den = pow_int(10, frac.size());
      Int num = ipart * den + (negative ? -digits : digits);
      return make_rat(num, den);
    }
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (sgn(den) <= 0) throw ParseError("non-positive denominator: " + s);
    return make_rat(num, den);
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed rational: " + s);
  }
}

std::string to_string(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_string(const RatVec& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << to_string(v[i]);
  }
  return os.str();
}

namespace {
constexpr uint64_t kFnvOffset = 1469598103934665603ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

uint64_t fnv_str(uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0x1f;  // field separator
  h *= kFnvPrime;
  return h;
}
}  // namespace

uint64_t content_hash_vec(const RatVec& v, uint64_t seed) {
  uint64_t h = seed ^ kFnvOffset;
  for (const Rat& x : v) h = fnv_str(h, to_string(x));
  return h;
}

uint64_t content_hash(const RatMat& m) {
  uint64_t h = kFnvOffset;
  for (const RatVec& row : m) {
    h = content_hash_vec(row, h);
    h = fnv_str(h, ";");
  }
  return h;
}

std::string serialize(const RatMat& m) {
  std::ostringstream os;
  os << m.size();
  for (const RatVec& row : m) os << '|' << to_string(row);
  return os.str();
}

}  // namespace latlab
