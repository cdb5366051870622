#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "klr/laurent.hpp"

using klr::Int;
using klr::LaurentPoly;
using klr::Rational;

namespace {

LaurentPoly parse(const std::string& s) { return LaurentPoly::parse(s); }

LaurentPoly random_poly(std::mt19937& rng) {
  std::uniform_int_distribution<int> nterms(0, 5), expo(-6, 6), coeff(-9, 9);
  LaurentPoly p;
  const int k = nterms(rng);
  for (int i = 0; i < k; ++i) p += LaurentPoly::term(coeff(rng), expo(rng));
  return p;
}

}  // namespace

TEST_CASE("multiplication examples") {
  CHECK(LaurentPoly::v(1) * LaurentPoly::v(-1) == LaurentPoly::one());
  const LaurentPoly d = LaurentPoly::v(-1) - LaurentPoly::v(1);
  CHECK(d * d == parse("v^-2 - 2 + v^2"));
  CHECK((LaurentPoly::one() + LaurentPoly::v(2)) * LaurentPoly::zero() ==
        LaurentPoly::zero());
}

TEST_CASE("bar involution examples") {
  CHECK(LaurentPoly::v(1).bar() == LaurentPoly::v(-1));
  CHECK((LaurentPoly::v(-1) - LaurentPoly::v(1)).bar() ==
        LaurentPoly::v(1) - LaurentPoly::v(-1));
  CHECK((LaurentPoly::one() + LaurentPoly::v(2)).bar() ==
        LaurentPoly::one() + LaurentPoly::v(-2));
}

TEST_CASE("bar is an involutive ring homomorphism") {
  std::mt19937 rng(20240811);
  for (int i = 0; i < 200; ++i) {
    const LaurentPoly a = random_poly(rng), b = random_poly(rng);
    CHECK(a.bar().bar() == a);
    CHECK((a * b).bar() == a.bar() * b.bar());
    CHECK((a + b).bar() == a.bar() + b.bar());
  }
}

TEST_CASE("multiplication is associative, commutative, distributive") {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const LaurentPoly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("evaluation") {
  CHECK((LaurentPoly::v(1) + LaurentPoly::v(-1)).eval(1) == Rational(2));
  CHECK((LaurentPoly::one() + LaurentPoly::v(2)).eval(2) == Rational(5));
  CHECK(LaurentPoly::v(-2).eval(2) == Rational(1, 4));
  CHECK_THROWS_AS(LaurentPoly::v(1).eval(0), klr::validation_error);
}

TEST_CASE("to_R examples and round trip") {
  CHECK(klr::to_R(LaurentPoly::one(), 0) == LaurentPoly::one());
  // r_{e,s} = v^{-1} - v gives R = q - 1.
  CHECK(klr::to_R(LaurentPoly::v(-1) - LaurentPoly::v(1), 1) ==
        parse("-1 + v") /* q - 1 with q as the variable */);
  CHECK_THROWS_AS(klr::to_R(LaurentPoly::v(2), 0), klr::validation_error);
  CHECK_THROWS_AS(klr::to_R(LaurentPoly::v(1), 0), klr::validation_error);

  // Round trip: substituting q = v^{-2} and multiplying by v^d recovers r.
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> dd(0, 6), coeff(0, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = dd(rng);
    LaurentPoly R;
    for (int j = 0; j <= d; ++j) R += LaurentPoly::term(coeff(rng), j);
    LaurentPoly r;
    for (const auto& [j, c] : R.terms()) r += LaurentPoly::term(c, d - 2 * j);
    if (r.is_zero()) continue;
    CHECK(klr::to_R(r, d) == R);
  }
}

TEST_CASE("rendering and parsing") {
  CHECK(parse("v^-1 + v").str() == "v^-1 + v");
  CHECK(parse("1 + 2*v^2").str() == "1 + 2*v^2");
  CHECK(LaurentPoly::zero().str() == "0");
  CHECK(parse("0").is_zero());
  CHECK((LaurentPoly::v(1) - LaurentPoly::v(-1)).str() == "-v^-1 + v");
  CHECK(parse("-v^-1 + v") == LaurentPoly::v(1) - LaurentPoly::v(-1));
  CHECK(parse("3").str() == "3");
  CHECK(parse("v").str() == "v");
  CHECK(parse(" - 2*v^-3 + 4 ").str() == "-2*v^-3 + 4");
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse(""), klr::validation_error);
  CHECK_THROWS_AS(parse("v^"), klr::validation_error);
  CHECK_THROWS_AS(parse("q + 1"), klr::validation_error);
}

TEST_CASE("render/parse round trip on random polynomials") {
  std::mt19937 rng(1234);
  for (int i = 0; i < 300; ++i) {
    const LaurentPoly p = random_poly(rng);
    CHECK(LaurentPoly::parse(p.str()) == p);
    CHECK(LaurentPoly::parse(p.str("q"), "q") == p);
  }
}

TEST_CASE("canonical form strips zeros") {
  LaurentPoly p = LaurentPoly::term(3, 2);
  p += LaurentPoly::term(-3, 2);
  CHECK(p.is_zero());
  CHECK(p == LaurentPoly::zero());
  CHECK(p.terms().empty());
}
