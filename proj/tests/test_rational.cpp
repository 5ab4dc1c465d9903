#include <doctest.h>

#include <map>
#include <sstream>

#include "ratdial/rational.hpp"
#include "ratdial/error.hpp"

using ratdial::Rational;

TEST_CASE("construction reduces to canonical form") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(4, 2).str() == "2");
  CHECK(Rational(3, -6).str() == "-1/2");
  CHECK_THROWS_AS(Rational(1, 0), ratdial::Error);
}

TEST_CASE("arithmetic stays canonical") {
  Rational half(1, 2), third(1, 3);
  CHECK((half + third).str() == "5/6");
  CHECK((half - third).str() == "1/6");
  CHECK((half * third).str() == "1/6");
  CHECK((half / third).str() == "3/2");
  CHECK((third + Rational(2, 3)).str() == "1");
  CHECK((half - half).str() == "0");
  CHECK_THROWS_AS(half / Rational(0), ratdial::Error);

  // Denominators always positive, gcd always 1 after arithmetic.
  Rational x(6, 10);
  Rational y = x * Rational(5, 3);
  CHECK(y.str() == "1");
  CHECK(y == Rational(1));
}

TEST_CASE("ordering is exact value ordering") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(2, 3) > Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(0));
  CHECK(Rational(7, 7) == Rational(1));
  CHECK(Rational(1, 1000000) > Rational(0));
}

TEST_CASE("parse accepts fractions, integers and exact decimals") {
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-2") == Rational(-2));
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("1.5") == Rational(3, 2));
  CHECK(Rational::parse("0.1") == Rational(1, 10));
  CHECK(Rational::parse(" 6/8 ") == Rational(3, 4));
  CHECK(Rational::parse("999999/1000000").str() == "999999/1000000");
  CHECK_THROWS_AS(Rational::parse(""), ratdial::ParseError);
  CHECK_THROWS_AS(Rational::parse("1/"), ratdial::ParseError);
  CHECK_THROWS_AS(Rational::parse("/2"), ratdial::ParseError);
  CHECK_THROWS_AS(Rational::parse("1/0"), ratdial::ParseError);
  CHECK_THROWS_AS(Rational::parse("a"), ratdial::ParseError);
  CHECK_THROWS_AS(Rational::parse("1.2.3"), ratdial::ParseError);
  CHECK_THROWS_AS(Rational::parse("1e-3"), ratdial::ParseError);
}

TEST_CASE("predicates") {
  CHECK(Rational(0).is_zero());
  CHECK(Rational(1).is_one());
  CHECK(Rational(0).is_certain());
  CHECK(Rational(1).is_certain());
  CHECK_FALSE(Rational(1, 2).is_certain());
  CHECK(Rational(1, 2).in_unit_interval());
  CHECK(Rational(0).in_unit_interval());
  CHECK(Rational(1).in_unit_interval());
  CHECK_FALSE(Rational(5, 4).in_unit_interval());
  CHECK_FALSE(Rational(-1, 4).in_unit_interval());
  CHECK(Rational(-3, 4).sign() == -1);
  CHECK(Rational(0).sign() == 0);
  CHECK(Rational(3, 4).sign() == 1);
}

TEST_CASE("streaming matches str") {
  std::ostringstream os;
  os << Rational(22, 8);
  CHECK(os.str() == "11/4");
}

TEST_CASE("values hash-compare consistently via ordering in maps") {
  // Equal values must collapse to one key regardless of construction route.
  std::map<Rational, int> m;
  m[Rational(1, 2)] = 1;
  m[Rational(2, 4)] = 2;
  m[Rational::parse("0.5")] = 3;
  CHECK(m.size() == 1);
}
