#include "doctest.h"

#include "ahmes/charpoly.hpp"
#include "ahmes/diagnostics.hpp"
#include "ahmes/errors.hpp"

#include <string>
#include <vector>

using namespace ahmes;

namespace {

Enclosure decimal_bracket(const std::string& digits, unsigned places) {
  auto dot = digits.find('.');
  REQUIRE(dot != std::string::npos);
  std::string frac = digits.substr(dot + 1);
  REQUIRE(frac.size() == places);
  Rat scale = pow_rat(Rat(10), static_cast<long>(places));
  Rat v = Rat(Int(digits.substr(0, dot))) + Rat(Int(frac)) / scale;
  return Enclosure(v, v + 1 / scale);
}

bool overlaps(const Enclosure& a, const Enclosure& b) {
  return a.lo <= b.hi && b.lo <= a.hi;
}

RootEnclosure point_two_root() {
  // x - 2, the weight vector (1); keeps mu bases exact
  return allones_root(1, Precision());
}

std::vector<Enclosure> points(std::initializer_list<Rat> vals) {
  std::vector<Enclosure> out;
  for (const Rat& v : vals) out.push_back(Enclosure::point(v));
  return out;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("mu values normalize log growth by c^n") {
  SeriesInstance s = make_series(WeightVector({1}), Sequence::geometric(Int(2)));
  RootEnclosure c = point_two_root();
  Rat w = pow_rat(Rat(10), -25);

  // mu_1 = ln(2)/2 = 0.346573590279972654708616060729...
  Enclosure truth1 = decimal_bracket("0.346573590279972654708616060729", 30);
  Enclosure got1 = mu_value(s, c, 1, w);
  CHECK(got1.width() <= w);
  CHECK(overlaps(got1, truth1));

  // mu_3 = 3 ln(2)/8 = 0.259930192709979491031462045546...
  Enclosure truth3 = decimal_bracket("0.259930192709979491031462045546", 30);
  CHECK(overlaps(mu_value(s, c, 3, w), truth3));

  SUBCASE("mu_sequence packs mu_{i+1} into slot i") {
    std::vector<Enclosure> mu = mu_sequence(s, c, 4, Precision(w));
    REQUIRE_EQ(mu.size(), 4);
    CHECK(overlaps(mu[0], truth1));
    CHECK(overlaps(mu[2], truth3));
    // mu_2 = 2 ln 2 / 4 equals mu_1 here
    CHECK(overlaps(mu[1], truth1));
  }
}

TEST_CASE("peak classification over synthetic enclosures") {
  SUBCASE("sharp values pick out the certified peaks") {
    PeakSet ps = peaks(points({Rat(1), Rat(1), Rat(3), Rat(2), Rat(10)}));
    CHECK_EQ(ps.horizon, 5);
    CHECK_EQ(ps.members, std::vector<std::size_t>{2, 4});
    CHECK(ps.undecided.empty());
  }
  SUBCASE("an enclosure straddling its threshold stays undecided") {
    std::vector<Enclosure> mu = points({Rat(1), Rat(1), Rat(0), Rat(2), Rat(10)});
    // mu_3 in [1.2, 1.3] straddles (1 + 1/4) * 1 = 1.25 at m = 2
    mu[2] = Enclosure(Rat(12, 10), Rat(13, 10));
    PeakSet ps = peaks(mu);
    CHECK_EQ(ps.undecided, std::vector<std::size_t>{2});
    // m = 3 now clears its threshold: 2 > (1 + 1/9) * max(..., 1.3)
    CHECK_EQ(ps.members, std::vector<std::size_t>{3, 4});
  }
}

TEST_CASE("peaks of a doubly exponential family certify en masse") {
  // a_n = 2^(3^n), c = 2: mu_n = (3/2)^n ln 2 grows by factor 3/2, which
  // beats 1 + 1/m^2 from m = 2 on
  SeriesInstance s = make_series(WeightVector({1}), Sequence::power_tower(Int(2), 3));
  PeakSet ps = peaks(s, point_two_root(), 6, Precision(pow_rat(Rat(10), -20)));
  CHECK_EQ(ps.horizon, 6);
  CHECK_EQ(ps.members, std::vector<std::size_t>{2, 3, 4, 5});
  CHECK(ps.undecided.empty());
}

TEST_CASE("local peak windows") {
  SUBCASE("holds for the tower family") {
    SeriesInstance s = make_series(WeightVector({1}),
                                   Sequence::power_tower(Int(2), 3));
    LocalPeakVerdict v = local_peak_check(s, 2, 3, point_two_root(),
                                          Precision(pow_rat(Rat(10), -20)));
    CHECK(v == LocalPeakVerdict::holds);
  }
  SUBCASE("geometric growth never certifies the hypothesis") {
    // mu_n = n ln2 / 2^n decays, so mu_{Q+1} cannot beat the running max
    SeriesInstance s = make_series(WeightVector({1}), Sequence::geometric(Int(2)));
    LocalPeakVerdict v = local_peak_check(s, 2, 4, point_two_root(),
                                          Precision(pow_rat(Rat(10), -20)));
    CHECK(v == LocalPeakVerdict::hypothesis_not_met);
  }
  SUBCASE("certified hypothesis with a failing exact window") {
    // synthetic mu forces stage one; the terms 4, 8, 64 then violate the
    // window inequality: (4*8/64)^5 = 1/32 is not <= 1/64
    SeriesInstance s = make_series(WeightVector({1}),
                                   Sequence::explicit_list({Int(4), Int(8), Int(64)}));
    std::vector<Enclosure> mu = points({Rat(1), Rat(1), Rat(10)});
    CHECK(local_peak_check(s, 1, 2, mu) == LocalPeakVerdict::fails);
  }
  SUBCASE("wide mu around the threshold is undecided") {
    SeriesInstance s = make_series(WeightVector({1}),
                                   Sequence::explicit_list({Int(4), Int(8), Int(64)}));
    std::vector<Enclosure> mu = points({Rat(1), Rat(1), Rat(0)});
    mu[2] = Enclosure(Rat(1), Rat(2));  // straddles (1 + 1/4) * 1
    CHECK(local_peak_check(s, 1, 2, mu) == LocalPeakVerdict::undecided);
  }
}

TEST_CASE("mahler gaps measure cleared tails") {
  Precision prec(pow_rat(Rat(10), -10));
  SUBCASE("sylvester at N = 4 sits right at gap 1") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::sylvester());
    MahlerGapReport rep = mahler_gap(s, 4, prec);
    CHECK_EQ(rep.N, 4);
    CHECK_EQ(rep.clearing_factor, Int(1806));  // 2*3*7*43
    CHECK(rep.partial_integral);
    CHECK_EQ(rep.reduced_denominator, Int(1806));
    // true tail is exactly 1/1806, so both gaps must contain 1
    CHECK(rep.gap.contains(Rat(1)));
    CHECK(rep.reduced_gap.contains(Rat(1)));
    MahlerGapReport r3 = mahler_gap(s, 3, prec);
    CHECK_EQ(r3.clearing_factor, Int(42));
    CHECK_EQ(r3.reduced_denominator, Int(42));
  }
  SUBCASE("geometric reduced gap pins the tail at exactly 1") {
    SeriesInstance s = make_series(WeightVector({1}), Sequence::geometric(Int(2)));
    for (std::size_t N : {3ul, 6ul, 12ul}) {
      MahlerGapReport rep = mahler_gap(s, N, prec);
      CHECK_EQ(rep.reduced_denominator, pow_int(Int(2), N));
      CHECK(rep.partial_integral);
      CHECK(rep.reduced_gap.contains(Rat(1)));
      CHECK_EQ(rep.reduced_gap.hi, Rat(1));  // tail bound is exact here
    }
  }
  SUBCASE("max weight drives the clearing factor") {
    SeriesInstance s = make_series(WeightVector({0, 2}), Sequence::geometric(Int(2)));
    MahlerGapReport rep = mahler_gap(s, 3, prec);
    // D_3 = (2 * 4 * 8)^2
    CHECK_EQ(rep.clearing_factor, Int(4096));
  }
}

TEST_CASE("growth exponents recover a_n^(1/c^n)") {
  SeriesInstance s = make_series(WeightVector({1}), Sequence::geometric(Int(2)));
  Precision prec(pow_rat(Rat(10), -20));
  // a_3^(1/8) = 2^(3/8) = 1.296839554651009665933754117792...
  Enclosure truth = decimal_bracket("1.296839554651009665933754117792", 30);
  Enclosure via_base = growth_exponent(s, Enclosure::point(Rat(2)), 3, prec);
  CHECK(overlaps(via_base, truth));
  CHECK(via_base.width() <= pow_rat(Rat(10), -20));
  Enclosure via_root = growth_exponent(s, point_two_root(), 3, prec);
  CHECK(overlaps(via_root, truth));
  CHECK(overlaps(via_base, via_root));
}

}
