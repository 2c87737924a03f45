#include "doctest.h"

#include "ahmes/rational.hpp"

#include <stdexcept>

using namespace ahmes;

TEST_SUITE("rational") {

TEST_CASE("parse_rational accepts integers, fractions, and 1e-k shorthand") {
  CHECK_EQ(parse_rational("42"), Rat(42));
  CHECK_EQ(parse_rational("-7"), Rat(-7));
  CHECK_EQ(parse_rational("3/4"), Rat(3, 4));
  CHECK_EQ(parse_rational("-3/4"), Rat(-3, 4));
  CHECK_EQ(parse_rational("6/8"), Rat(3, 4));  // canonicalized
  CHECK_EQ(parse_rational("1e-3"), Rat(1, 1000));
  CHECK_EQ(parse_rational("1e-30"), Rat(1) / pow_rat(Rat(10), 30));

  SUBCASE("rejects malformed input") {
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1.5"), std::invalid_argument);
  }
}

TEST_CASE("rational_to_string always prints p/q") {
  CHECK_EQ(rational_to_string(Rat(5)), "5/1");
  CHECK_EQ(rational_to_string(Rat(-3, 4)), "-3/4");
  CHECK_EQ(rational_to_string(Rat(0)), "0/1");
  // roundtrip through the parser
  Rat x(355, 113);
  CHECK_EQ(parse_rational(rational_to_string(x)), x);
}

TEST_CASE("floor and ceiling on rationals") {
  CHECK_EQ(floor_rat(Rat(7, 2)), Int(3));
  CHECK_EQ(ceil_rat(Rat(7, 2)), Int(4));
  CHECK_EQ(floor_rat(Rat(-7, 2)), Int(-4));
  CHECK_EQ(ceil_rat(Rat(-7, 2)), Int(-3));
  CHECK_EQ(floor_rat(Rat(6)), Int(6));
  CHECK_EQ(ceil_rat(Rat(6)), Int(6));
}

TEST_CASE("integer and rational powers") {
  CHECK_EQ(pow_int(Int(2), 10), Int(1024));
  CHECK_EQ(pow_int(Int(3), 0), Int(1));
  CHECK_EQ(pow_rat(Rat(2, 3), 3), Rat(8, 27));
  CHECK_EQ(pow_rat(Rat(2, 3), -2), Rat(9, 4));
  CHECK_EQ(pow_rat(Rat(5), 0), Rat(1));
}

TEST_CASE("dyadic rounding brackets the input on the 2^-k grid") {
  Rat x(1, 3);
  SUBCASE("down then up differ by one grid cell off the grid") {
    for (unsigned long k : {4ul, 17ul, 64ul}) {
      Rat dn = round_down_dyadic(x, k);
      Rat up = round_up_dyadic(x, k);
      CHECK(dn < x);
      CHECK(up > x);
      CHECK_EQ(up - dn, pow_rat(Rat(1, 2), static_cast<long>(k)));
    }
  }
  SUBCASE("grid points are fixed points") {
    Rat g(5, 16);
    CHECK_EQ(round_down_dyadic(g, 4), g);
    CHECK_EQ(round_up_dyadic(g, 4), g);
  }
  SUBCASE("negative input rounds away from zero going down") {
    Rat y(-1, 3);
    CHECK(round_down_dyadic(y, 8) < y);
    CHECK(round_up_dyadic(y, 8) > y);
  }
  SUBCASE("concrete cells") {
    CHECK_EQ(round_down_dyadic(Rat(1, 3), 2), Rat(1, 4));
    CHECK_EQ(round_up_dyadic(Rat(1, 3), 2), Rat(1, 2));
  }
}

TEST_CASE("floor_log2 over positive rationals") {
  CHECK_EQ(floor_log2(Rat(1)), 0);
  CHECK_EQ(floor_log2(Rat(2)), 1);
  CHECK_EQ(floor_log2(Rat(3)), 1);
  CHECK_EQ(floor_log2(Rat(4)), 2);
  CHECK_EQ(floor_log2(Rat(1, 2)), -1);
  CHECK_EQ(floor_log2(Rat(1, 3)), -2);
  CHECK_EQ(floor_log2(Rat(5, 4)), 0);
  // huge exponents stay exact
  CHECK_EQ(floor_log2(pow_rat(Rat(2), 300)), 300);
  CHECK_EQ(floor_log2(pow_rat(Rat(1, 2), 300)), -300);
}

TEST_CASE("to_decimal_string truncates toward zero") {
  CHECK_EQ(to_decimal_string(Rat(1, 3), 5), "0.33333");
  CHECK_EQ(to_decimal_string(Rat(2, 3), 5), "0.66666");
  CHECK_EQ(to_decimal_string(Rat(-1, 3), 3), "-0.333");
  CHECK_EQ(to_decimal_string(Rat(7, 2), 2), "3.50");
  CHECK_EQ(to_decimal_string(Rat(5), 0), "5");
  CHECK_EQ(to_decimal_string(Rat(1618, 1000), 3), "1.618");
}

}
