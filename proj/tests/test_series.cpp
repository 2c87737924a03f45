#include "doctest.h"

#include "ahmes/errors.hpp"
#include "ahmes/series.hpp"

#include <stdexcept>

using namespace ahmes;

TEST_SUITE("series") {

TEST_CASE("window products and term values are exact") {
  SeriesInstance s = make_series(WeightVector({1, 1}), Sequence::geometric(Int(2)));
  // x_n = a_{n-1} a_n = 2^(2n-1)
  CHECK_EQ(term_xn(s, 2), Int(8));
  CHECK_EQ(term_xn(s, 5), Int(512));
  CHECK_EQ(term_value(s, 2), Rat(1, 8));
  CHECK_THROWS_AS(term_xn(s, 1), std::invalid_argument);  // window starts at d

  SeriesInstance q = make_series(WeightVector({1, 0, 2, 1}),
                                 Sequence::geometric(Int(2)));
  // x_4 = a_1^1 a_3^2 a_4^1 = 2 * 64 * 16
  CHECK_EQ(term_xn(q, 4), Int(2048));

  SUBCASE("numerator sequence feeds in with the window offset") {
    SeriesInstance t = make_series(WeightVector({1, 1}),
                                   Sequence::geometric(Int(2)),
                                   Sequence::identity());
    // b_{n-d+1} / x_n with b_k = k
    CHECK_EQ(term_value(t, 2), Rat(1, 8));
    CHECK_EQ(term_value(t, 3), Rat(1, 16));  // b_2 / x_3 = 2 / 32
  }
}

TEST_CASE("partial sums telescope correctly") {
  SUBCASE("single weight over powers of two") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::geometric(Int(2)));
    CHECK_EQ(partial_sum(s, 3), Rat(7, 8));
    CHECK_EQ(partial_sum(s, 10), Rat(1023, 1024));
    CHECK_THROWS_AS(partial_sum(s, 0), std::invalid_argument);
  }
  SUBCASE("pair weights over powers of two head toward 1/6") {
    SeriesInstance s = make_series(WeightVector({1, 1}), Sequence::geometric(Int(2)));
    CHECK_EQ(partial_sum(s, 2), Rat(1, 8));
    CHECK_EQ(partial_sum(s, 3), Rat(5, 32));
  }
  SUBCASE("sylvester reciprocals approach 1 from below") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::sylvester());
    CHECK_EQ(partial_sum(s, 4), Rat(1805, 1806));
  }
}

TEST_CASE("tail_bound certifies the remainder") {
  SUBCASE("geometric tails are exact for a single weight") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::geometric(Int(2)));
    CHECK_EQ(tail_bound(s, 3), Rat(1, 8));
    CHECK_EQ(tail_bound(s, 5), Rat(1, 32));
    // partial + tail hits the limit exactly here
    CHECK_EQ(partial_sum(s, 3) + tail_bound(s, 3), Rat(1));
  }
  SUBCASE("geometric tails are exact for the pair weight too") {
    SeriesInstance s = make_series(WeightVector({1, 1}), Sequence::geometric(Int(2)));
    // ratio rho = (1/2)^total = 1/4, so B = t_{N+1}/(1 - 1/4)
    CHECK_EQ(partial_sum(s, 3) + tail_bound(s, 3), Rat(1, 6));
  }
  SUBCASE("sylvester tail at N=4 brackets the true remainder 1/1806") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::sylvester());
    Rat b = tail_bound(s, 4);
    CHECK(b >= Rat(1, 1806));
    CHECK(b <= Rat(2, 1806));
  }
  SUBCASE("families without certificates refuse") {
    SeriesInstance id = make_series(WeightVector({1}), Sequence::identity());
    CHECK_THROWS_AS(tail_bound(id, 5), NoCertificate);
    SeriesInstance fin = make_series(WeightVector({1}),
                                     Sequence::explicit_list({Int(2), Int(4)}));
    CHECK_THROWS_AS(tail_bound(fin, 1), NoCertificate);
    // nonconstant numerator blocks the envelope
    SeriesInstance nb = make_series(WeightVector({1}), Sequence::geometric(Int(2)),
                                    Sequence::identity());
    CHECK_THROWS_AS(tail_bound(nb, 3), NoCertificate);
  }
}

TEST_CASE("eval_series encloses known limits") {
  Precision tight(pow_rat(Rat(10), -30));
  SUBCASE("sum of 1/2^n encloses 1") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::geometric(Int(2)));
    std::size_t used = 0;
    Enclosure e = eval_series(s, tight, &used);
    CHECK(e.contains(Rat(1)));
    CHECK(e.width() <= pow_rat(Rat(10), -30));
    CHECK(used >= 100);  // 2^-N accuracy needs about 100 terms
  }
  SUBCASE("sum of 1/(2^(n-1) 2^n) encloses 1/6") {
    SeriesInstance s = make_series(WeightVector({1, 1}), Sequence::geometric(Int(2)));
    Enclosure e = eval_series(s, tight);
    CHECK(e.contains(Rat(1, 6)));
    CHECK(e.width() <= pow_rat(Rat(10), -30));
  }
  SUBCASE("sylvester reciprocals enclose 1 at quadratic speed") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::sylvester());
    std::size_t used = 0;
    Enclosure e = eval_series(s, Precision(pow_rat(Rat(10), -100)), &used);
    CHECK(e.contains(Rat(1)));
    CHECK(e.width() <= pow_rat(Rat(10), -100));
    CHECK(used <= 10);  // doubly exponential terms get there in single digits
  }
  SUBCASE("no certificate for the harmonic-like instance") {
    SeriesInstance id = make_series(WeightVector({1}), Sequence::identity());
    CHECK_THROWS_AS(eval_series(id, Precision()), NoCertificate);
  }
}

TEST_CASE("hypothesis checks clear rational exponents exactly") {
  SUBCASE("pair weights over a_n = n satisfy tau = 1/2, eta = 1/4") {
    SeriesInstance s = make_series(WeightVector({1, 1}), Sequence::identity());
    HypothesisReport rep = check_hypotheses(s, Rat(1, 4), Rat(1, 2), 500);
    CHECK(rep.clean());
    CHECK_EQ(rep.horizon, 500);
  }
  SUBCASE("single weight over a_n = n violates tau = 1/2 from n = 2 on") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::identity());
    HypothesisReport rep = check_hypotheses(s, Rat(0), Rat(1, 2), 100);
    CHECK_FALSE(rep.clean());
    REQUIRE_EQ(rep.violations.size(), 99);
    CHECK_EQ(rep.violations.front(), 2);
    CHECK_EQ(rep.violations.back(), 100);
  }
  SUBCASE("growing numerator b_n = n trips the eta bound") {
    SeriesInstance s = make_series(WeightVector({1, 1}), Sequence::geometric(Int(2)),
                                   Sequence::identity());
    HypothesisReport rep = check_hypotheses(s, Rat(1, 4), Rat(1, 2), 50);
    CHECK_FALSE(rep.clean());
    CHECK_EQ(rep.violations.front(), 2);  // 2 > 2^(1/4)
  }
  SUBCASE("exponent order is enforced") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::identity());
    CHECK_THROWS_AS(check_hypotheses(s, Rat(1, 2), Rat(1, 2), 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_hypotheses(s, Rat(-1), Rat(1, 2), 10),
                    std::invalid_argument);
  }
}

}
