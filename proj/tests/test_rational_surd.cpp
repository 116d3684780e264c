#include "doctest.h"
#include "pfc/rational.hpp"
#include "pfc/surd.hpp"

using namespace pfc;

TEST_CASE("rationals stay canonical") {
  Rational r = make_rational(6, -4);
  CHECK(r.get_num() == -3);
  CHECK(r.get_den() == 2);
  CHECK(to_string(r) == "-3/2");
  CHECK(to_fraction_string(Rational(2)) == "2/1");
  CHECK(to_string(Rational(2)) == "2");
  CHECK_THROWS_AS(make_rational(1, 0), std::invalid_argument);
}

TEST_CASE("parse_rational reads fractions and decimals exactly") {
  CHECK(parse_rational("2/3") == make_rational(2, 3));
  CHECK(parse_rational("-5") == Rational(-5));
  CHECK(parse_rational("0.7") == make_rational(7, 10));
  CHECK(parse_rational("1.25") == make_rational(5, 4));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("floor and frac") {
  CHECK(frac(make_rational(7, 3)) == make_rational(1, 3));
  CHECK(frac(make_rational(-1, 3)) == make_rational(2, 3));
  CHECK(frac(Rational(-2)) == 0);
  CHECK(floor_rational(make_rational(-1, 3)) == -1);
  CHECK(pow(make_rational(2, 3), 3) == make_rational(8, 27));
  CHECK(pow(make_rational(2, 3), 0) == 1);
}

TEST_CASE("lambda_2 in Q(sqrt 13)") {
  QuadSurd l(make_rational(-1, 6), make_rational(-1, 6), 13);
  // root of x^2 + x/3 - 1/3
  QuadSurd poly = l * l + l / QuadSurd(3) - QuadSurd(make_rational(1, 3));
  CHECK(poly == QuadSurd(0));
  CHECK(l.to_string() == "(-1-sqrt(13))/6");
  CHECK(l.sign() == -1);
  CHECK(l.to_double() == doctest::Approx(-0.7675918792439983).epsilon(1e-15));
  CHECK(l.norm() == make_rational(-1, 3));
  CHECK((l * l.conjugate()) == QuadSurd(make_rational(-1, 3)));
}

TEST_CASE("radicands are normalized and fields do not mix") {
  QuadSurd a(Rational(0), Rational(1), 52);  // sqrt 52 = 2 sqrt 13
  CHECK(a.radicand() == 13);
  CHECK(a.surd_part() == 2);
  QuadSurd b(Rational(0), Rational(1), 4);  // perfect square collapses
  CHECK(b.is_rational());
  CHECK(b == QuadSurd(2));
  QuadSurd c(Rational(0), Rational(1), 2);
  CHECK_THROWS_AS(a + c, std::domain_error);
  CHECK((a + QuadSurd(make_rational(1, 2))).radicand() == 13);
}

TEST_CASE("exact sign near zero") {
  // 18 - 5 sqrt 13 = 18 - 18.0277... < 0
  QuadSurd x(Rational(18), Rational(-5), 13);
  CHECK(x.sign() == -1);
  CHECK((-x).sign() == 1);
  QuadSurd tiny = x * x.conjugate();  // 324 - 325 = -1
  CHECK(tiny == QuadSurd(-1));
}

TEST_CASE("division and powers") {
  QuadSurd x(Rational(1), Rational(1), 13);
  QuadSurd inv = QuadSurd(1) / x;
  CHECK(x * inv == QuadSurd(1));
  CHECK(pow(x, 2) == x * x);
  CHECK_THROWS(QuadSurd(1) / QuadSurd(0));
}

TEST_CASE("split_square_factor") {
  auto [k, r] = split_square_factor(Integer(72));
  CHECK(k == 6);
  CHECK(r == 2);
}
