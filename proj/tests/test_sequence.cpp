#include "doctest.h"

#include "ahmes/errors.hpp"
#include "ahmes/sequence.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

using namespace ahmes;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& body) {
    char name[] = "/tmp/ahmes_seq_XXXXXX";
    int fd = mkstemp(name);
    REQUIRE(fd != -1);
    close(fd);
    path = name;
    std::ofstream out(path);
    out << body;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("sequence") {

TEST_CASE("explicit lists index from 1 and stop at their horizon") {
  Sequence s = Sequence::explicit_list({Int(2), Int(7), Int(42)});
  CHECK_EQ(s.at(1), Int(2));
  CHECK_EQ(s.at(3), Int(42));
  CHECK_EQ(s.horizon().value(), 3);
  CHECK_THROWS_AS(s.at(4), IndexBeyondHorizon);
  CHECK_THROWS_AS(s.at(0), std::invalid_argument);

  CHECK_THROWS_AS(Sequence::explicit_list({}), std::invalid_argument);
  CHECK_THROWS_AS(Sequence::explicit_list({Int(0)}), std::invalid_argument);
  CHECK_THROWS_AS(Sequence::explicit_list({Int(2), Int(-3)}),
                  std::invalid_argument);
}

TEST_CASE("closed-form families") {
  SUBCASE("identity and constant run forever") {
    Sequence id = Sequence::identity();
    CHECK_EQ(id.at(1), Int(1));
    CHECK_EQ(id.at(1000), Int(1000));
    CHECK_FALSE(id.horizon().has_value());
    Sequence c = Sequence::constant(Int(9));
    CHECK_EQ(c.at(1), Int(9));
    CHECK_EQ(c.at(77), Int(9));
    CHECK_THROWS_AS(Sequence::constant(Int(0)), std::invalid_argument);
  }
  SUBCASE("geometric is base^n") {
    Sequence g = Sequence::geometric(Int(2));
    CHECK_EQ(g.at(1), Int(2));
    CHECK_EQ(g.at(10), Int(1024));
    CHECK_EQ(g.at(64), pow_int(Int(2), 64));
    CHECK_THROWS_AS(Sequence::geometric(Int(1)), std::invalid_argument);
  }
  SUBCASE("power towers are base^(k^n)") {
    Sequence t = Sequence::power_tower(Int(2), 3);
    CHECK_EQ(t.at(1), Int(8));           // 2^3
    CHECK_EQ(t.at(2), Int(512));         // 2^9
    CHECK_EQ(t.at(3), pow_int(Int(2), 27));
    CHECK_THROWS_AS(Sequence::power_tower(Int(2), 1), std::invalid_argument);
  }
  SUBCASE("towers refuse terms that would not fit in memory") {
    Sequence t = Sequence::power_tower(Int(2), 2);
    CHECK_THROWS_AS(t.at(100), PrecisionCapExceeded);
  }
}

TEST_CASE("sylvester sequence follows s_{n+1} = s_n^2 - s_n + 1") {
  Sequence s = Sequence::sylvester();
  CHECK_EQ(s.at(1), Int(2));
  CHECK_EQ(s.at(2), Int(3));
  CHECK_EQ(s.at(3), Int(7));
  CHECK_EQ(s.at(4), Int(43));
  CHECK_EQ(s.at(5), Int(1807));
  CHECK_EQ(s.at(6), Int(3263443));
  // recurrence holds further out
  Int a = s.at(9);
  CHECK_EQ(s.at(10), a * a - a + 1);
}

TEST_CASE("from_file parses one term per line with comments") {
  SUBCASE("comments and blank lines are skipped") {
    TempFile f("# header\n2\n\n  3\n7 # trailing note\n");
    Sequence s = Sequence::from_file(f.path);
    CHECK_EQ(s.horizon().value(), 3);
    CHECK_EQ(s.at(3), Int(7));
  }
  SUBCASE("missing file reports the path") {
    CHECK_THROWS_WITH_AS(Sequence::from_file("/nonexistent/seq.txt"),
                         doctest::Contains("/nonexistent/seq.txt"),
                         std::runtime_error);
  }
  SUBCASE("garbage lines report the line number") {
    TempFile f("2\nbogus\n");
    CHECK_THROWS_WITH_AS(Sequence::from_file(f.path), doctest::Contains(":2"),
                         std::runtime_error);
  }
  SUBCASE("nonpositive terms are rejected with their line number") {
    TempFile f("2\n0\n");
    CHECK_THROWS_WITH_AS(Sequence::from_file(f.path), doctest::Contains(":2"),
                         std::runtime_error);
  }
  SUBCASE("empty file is rejected") {
    TempFile f("# nothing here\n");
    CHECK_THROWS_AS(Sequence::from_file(f.path), std::runtime_error);
  }
}

TEST_CASE("step_ratio_bound certifies a_{m}/a_{m+1} sums") {
  SUBCASE("geometric ratios are exact") {
    Sequence g = Sequence::geometric(Int(2));
    CHECK_EQ(g.step_ratio_bound(5), Rat(1, 2));
    CHECK_EQ(Sequence::geometric(Int(10)).step_ratio_bound(1), Rat(1, 10));
  }
  SUBCASE("sylvester uses its first ratio, which bounds the rest") {
    Sequence s = Sequence::sylvester();
    CHECK_EQ(s.step_ratio_bound(1), Rat(2, 3));
    CHECK_EQ(s.step_ratio_bound(3), Rat(7, 43));
    Rat r = s.step_ratio_bound(2);
    for (std::size_t m = 2; m <= 6; ++m)
      CHECK(Rat(s.at(m)) / Rat(s.at(m + 1)) <= r);
  }
  SUBCASE("tower bound matches the first step and stays valid later") {
    Sequence t = Sequence::power_tower(Int(2), 2);
    Rat r = t.step_ratio_bound(1);
    CHECK_EQ(r, Rat(1, 4));
    for (std::size_t m = 1; m <= 4; ++m)
      CHECK(Rat(t.at(m)) / Rat(t.at(m + 1)) <= r);
  }
  SUBCASE("families with no certificate say so") {
    CHECK_THROWS_AS(Sequence::identity().step_ratio_bound(1), NoCertificate);
    CHECK_THROWS_AS(Sequence::constant(Int(3)).step_ratio_bound(1),
                    NoCertificate);
    CHECK_THROWS_AS(Sequence::explicit_list({Int(2)}).step_ratio_bound(1),
                    NoCertificate);
  }
}

}
