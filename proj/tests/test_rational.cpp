#include <doctest.h>

#include "latlab/error.hpp"
#include "latlab/rational.hpp"

using namespace latlab;

TEST_CASE("make_rat canonicalizes") {
  Rat r = make_rat(Int(6), Int(-4));
  CHECK(r == Rat(-3, 2));
  CHECK(r.get_num() == -3);
  CHECK(r.get_den() == 2);
  CHECK_THROWS_AS(make_rat(Int(1), Int(0)), InvalidParameterError);
}

TEST_CASE("floor and ceil on rationals") {
  CHECK(floor_rat(make_rat(Int(7), Int(2))) == 3);
  CHECK(floor_rat(make_rat(Int(-7), Int(2))) == -4);
  CHECK(floor_rat(Rat(4)) == 4);
  CHECK(ceil_rat(make_rat(Int(7), Int(2))) == 4);
  CHECK(ceil_rat(make_rat(Int(-7), Int(2))) == -3);
  CHECK(ceil_rat(Rat(-4)) == -4);
}

TEST_CASE("round_half_even") {
  CHECK(round_half_even(make_rat(Int(1), Int(2))) == 0);
  CHECK(round_half_even(make_rat(Int(3), Int(2))) == 2);
  CHECK(round_half_even(make_rat(Int(5), Int(2))) == 2);
  CHECK(round_half_even(make_rat(Int(-1), Int(2))) == 0);
  CHECK(round_half_even(make_rat(Int(-3), Int(2))) == -2);
  CHECK(round_half_even(make_rat(Int(7), Int(3))) == 2);
  CHECK(round_half_even(make_rat(Int(8), Int(3))) == 3);
  CHECK(round_half_even(Rat(5)) == 5);
  CHECK(round_half_even(Rat(-5)) == -5);
}

TEST_CASE("integer and rational powers") {
  CHECK(pow_int(Int(3), 0) == 1);
  CHECK(pow_int(Int(3), 4) == 81);
  CHECK(pow_int(Int(-2), 5) == -32);
  CHECK(pow_rat(make_rat(Int(21), Int(20)), 2) == make_rat(Int(441), Int(400)));
  CHECK(pow_rat(make_rat(Int(2), Int(3)), 0) == 1);
}

TEST_CASE("le_scaled_pow compares x^q <= gamma^(2p) * y^q exactly") {
  // gamma = 2, p = 1, q = 1: is x <= 4 y?
  CHECK(le_scaled_pow(Rat(4), Rat(2), 1, 1, Rat(1)));
  CHECK_FALSE(le_scaled_pow(make_rat(Int(401), Int(100)), Rat(2), 1, 1, Rat(1)));
  // gamma = 21/20, exponent 2p/q with p = 3, q = 2: threshold gamma^3.
  Rat g = make_rat(Int(21), Int(20));
  Rat bound = pow_rat(g, 3);
  CHECK(le_scaled_pow(bound, g, 3, 2, Rat(1)));
  CHECK_FALSE(le_scaled_pow(bound + make_rat(Int(1), Int(1000000)), g, 3, 2, Rat(1)));
  CHECK_THROWS_AS(le_scaled_pow(Rat(1), Rat(2), 1, 0, Rat(1)), InvalidParameterError);
  CHECK_THROWS_AS(le_scaled_pow(Rat(-1), Rat(2), 1, 1, Rat(1)), InvalidParameterError);
}

TEST_CASE("vector helpers") {
  RatVec a = {Rat(1), Rat(2), Rat(3)};
  RatVec b = {Rat(4), Rat(5), Rat(6)};
  CHECK(dot(a, b) == Rat(32));
  CHECK(norm_sq(a) == Rat(14));
  CHECK(vec_add(a, b) == RatVec{Rat(5), Rat(7), Rat(9)});
  CHECK(vec_sub(b, a) == RatVec{Rat(3), Rat(3), Rat(3)});
  CHECK(vec_scale(a, Rat(2)) == RatVec{Rat(2), Rat(4), Rat(6)});
  CHECK(is_zero_vec(RatVec{Rat(0), Rat(0)}));
  CHECK_FALSE(is_zero_vec(a));
}

TEST_CASE("lex ordering and canonical sign") {
  IntVec u = {Int(0), Int(1)};
  IntVec v = {Int(1), Int(-5)};
  CHECK(lex_less(u, v));
  CHECK_FALSE(lex_less(v, u));
  CHECK_FALSE(lex_less(u, u));
  IntVec w = {Int(-1), Int(0)};
  CHECK_FALSE(lex_positive(w));
  CHECK(canonical_sign(w) == IntVec{Int(1), Int(0)});
  CHECK(lex_positive(IntVec{Int(0), Int(2)}));
  CHECK(canonical_sign(IntVec{Int(0), Int(2)}) == IntVec{Int(0), Int(2)});
  CHECK_FALSE(lex_positive(IntVec{Int(0), Int(0)}));
  RatVec ra = {Rat(1), Rat(0)};
  RatVec rb = {Rat(1), make_rat(Int(1), Int(2))};
  CHECK(lex_less_rat(ra, rb));
}

TEST_CASE("parallel detects integer collinearity") {
  CHECK(parallel(IntVec{Int(2), Int(4)}, IntVec{Int(3), Int(6)}));
  CHECK(parallel(IntVec{Int(2), Int(-4)}, IntVec{Int(-1), Int(2)}));
  CHECK_FALSE(parallel(IntVec{Int(2), Int(4)}, IntVec{Int(3), Int(7)}));
  CHECK(parallel(IntVec{Int(0), Int(0)}, IntVec{Int(3), Int(7)}));
}

TEST_CASE("parse_rat handles fractions, integers, decimals") {
  CHECK(parse_rat("3/4") == make_rat(Int(3), Int(4)));
  CHECK(parse_rat("-3/4") == make_rat(Int(-3), Int(4)));
  CHECK(parse_rat("6/4") == make_rat(Int(3), Int(2)));
  CHECK(parse_rat("17") == Rat(17));
  CHECK(parse_rat("-17") == Rat(-17));
  CHECK(parse_rat("1.05") == make_rat(Int(21), Int(20)));
  CHECK(parse_rat("-0.5") == make_rat(Int(-1), Int(2)));
  CHECK(parse_rat("2.") == Rat(2));
  CHECK_THROWS_AS(parse_rat(""), ParseError);
  CHECK_THROWS_AS(parse_rat("abc"), ParseError);
  CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rat("1.2.3"), ParseError);
}

TEST_CASE("to_string round-trips through parse_rat") {
  for (const char* s : {"3/4", "-3/4", "17", "0", "21/20", "-1/2"}) {
    Rat r = parse_rat(s);
    CHECK(parse_rat(to_string(r)) == r);
  }
  CHECK(to_string(make_rat(Int(3), Int(2))) == "3/2");
  CHECK(to_string(Rat(7)) == "7");
}

TEST_CASE("content hashes separate distinct matrices") {
  RatMat a = {{Rat(1), Rat(2)}, {Rat(3), Rat(4)}};
  RatMat b = {{Rat(1), Rat(2)}, {Rat(3), Rat(5)}};
  RatMat c = {{Rat(1), Rat(2), Rat(3), Rat(4)}};
  CHECK(content_hash(a) == content_hash(a));
  CHECK(content_hash(a) != content_hash(b));
  CHECK(content_hash(a) != content_hash(c));
  RatVec v = {Rat(1), Rat(2)};
  CHECK(content_hash_vec(v, 1) != content_hash_vec(v, 2));
  CHECK(serialize(a) != serialize(c));
}
