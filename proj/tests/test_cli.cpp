#include "doctest.h"

#include "ahmes/cli.hpp"
#include "ahmes/rational.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace ahmes;
using nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
  json doc;  // parsed when out is JSON, null otherwise
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  RunResult r{code, out.str(), err.str(), json()};
  if (!r.out.empty() && (r.out[0] == '{' || r.out[0] == '['))
    r.doc = json::parse(r.out, nullptr, false);
  return r;
}

Rat field_rat(const json& j) { return parse_rational(j.get<std::string>()); }

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& body) {
    char name[] = "/tmp/ahmes_cli_XXXXXX";
    int fd = mkstemp(name);
    REQUIRE(fd != -1);
    close(fd);
    path = name;
    std::ofstream f(path);
    f << body;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("roots reports certified enclosures") {
  RunResult r = run({"roots", "--w", "1,1"});
  REQUIRE_EQ(r.code, 0);
  REQUIRE(r.doc.is_object());
  CHECK_EQ(r.doc["command"], "roots");
  CHECK_EQ(r.doc["poly"], "char");
  Rat lo = field_rat(r.doc["root"]["lo"]);
  Rat hi = field_rat(r.doc["root"]["hi"]);
  CHECK(hi - lo <= parse_rational("1e-12"));
  CHECK_EQ(r.doc["root"]["decimal_lo"].get<std::string>().substr(0, 13),
           "1.61803398874");

  SUBCASE("the two quartic polynomials separate") {
    RunResult c = run({"roots", "--w", "1,0,2,1", "--poly", "char"});
    REQUIRE_EQ(c.code, 0);
    CHECK_EQ(c.doc["root"]["decimal_lo"].get<std::string>().substr(0, 5), "1.914");
    RunResult t = run({"roots", "--w", "1,0,2,1", "--poly", "tilde"});
    REQUIRE_EQ(t.code, 0);
    CHECK_EQ(t.doc["kind"], "largest_positive");
    CHECK_EQ(t.doc["root"]["decimal_lo"].get<std::string>().substr(0, 5), "1.345");
  }
  SUBCASE("plain format emits key: value lines") {
    std::ostringstream out, err;
    REQUIRE_EQ(run_cli({"roots", "--w", "1,1", "--format", "plain"}, out, err), 0);
    CHECK(out.str().rfind("schema_version: 1\n", 0) == 0);
    CHECK(out.str().find("root.lo: ") != std::string::npos);
  }
}

TEST_CASE("eval encloses series limits") {
  RunResult r = run({"eval", "--w", "1", "--seq", "geometric:2"});
  REQUIRE_EQ(r.code, 0);
  Rat lo = field_rat(r.doc["value"]["lo"]);
  Rat hi = field_rat(r.doc["value"]["hi"]);
  CHECK(lo <= 1);
  CHECK(hi >= 1);
  CHECK(hi - lo <= parse_rational("1e-30"));
  CHECK_EQ(r.doc["terms_used"], 100);

  SUBCASE("uncertifiable instances exit 2") {
    RunResult bad = run({"eval", "--w", "1", "--seq", "identity"});
    CHECK_EQ(bad.code, 2);
    CHECK_EQ(bad.doc["error"]["type"], "no_certificate");
    CHECK(bad.err.find("no_certificate") != std::string::npos);
  }
}

TEST_CASE("hypotheses exit 0 when clean and 1 when violated") {
  RunResult ok = run({"hypotheses", "--w", "1,1", "--seq", "identity", "--tau",
                      "1/2", "--eta", "1/4", "--horizon", "200"});
  CHECK_EQ(ok.code, 0);
  CHECK_EQ(ok.doc["clean"], true);
  CHECK(ok.doc["violations"].empty());

  RunResult bad = run({"hypotheses", "--w", "1", "--seq", "identity", "--tau",
                       "1/2", "--horizon", "20"});
  CHECK_EQ(bad.code, 1);
  CHECK_EQ(bad.doc["clean"], false);
  REQUIRE_EQ(bad.doc["violations"].size(), 19);
  CHECK_EQ(bad.doc["violations"][0], 2);
}

TEST_CASE("diagnose surfaces mu, peaks, gaps, and window checks") {
  RunResult r = run({"diagnose", "--w", "1", "--seq", "sylvester", "--horizon",
                     "4", "--gaps", "4", "--peak", "2,3"});
  REQUIRE_EQ(r.code, 0);
  CHECK_EQ(r.doc["mu"].size(), 4);
  CHECK_EQ(r.doc["mu"][0]["mu"]["decimal_lo"].get<std::string>().substr(0, 10),
           "0.34657359");  // ln(2)/2
  CHECK(r.doc["peaks"]["members"].empty());
  CHECK_EQ(r.doc["local_peak"]["verdict"], "hypothesis_not_met");
  const json& m4 = r.doc["mahler"][3];
  CHECK_EQ(m4["clearing_factor"], "1806");
  CHECK_EQ(m4["partial_integral"], true);
  CHECK_EQ(m4["reduced_denominator"], "1806");
  Rat glo = field_rat(m4["reduced_gap"]["lo"]);
  Rat ghi = field_rat(m4["reduced_gap"]["hi"]);
  CHECK(glo <= 1);
  CHECK(ghi >= 1);
}

TEST_CASE("diagnose on a finite list skips the ledger only in auto mode") {
  TempFile terms("2\n3\n7\n43\n");
  // no tail certificate exists for an explicit list, so auto mode should
  // deliver mu/peaks with an empty ledger instead of failing outright
  RunResult autog = run({"diagnose", "--w", "1", "--seq", "list:" + terms.path,
                         "--horizon", "4"});
  REQUIRE_EQ(autog.code, 0);
  CHECK_EQ(autog.doc["mu"].size(), 4);
  CHECK(autog.doc["mahler"].empty());
  // an explicit --gaps request keeps the hard error
  RunResult forced = run({"diagnose", "--w", "1", "--seq",
                          "list:" + terms.path, "--horizon", "4", "--gaps",
                          "4"});
  CHECK_EQ(forced.code, 2);
  CHECK_EQ(forced.doc["error"]["type"], "no_certificate");
}

TEST_CASE("construct and verify roundtrip through files") {
  RunResult c = run({"construct", "--w", "1", "--C", "2", "--depth", "3"});
  REQUIRE_EQ(c.code, 0);
  REQUIRE(c.doc.is_object());
  CHECK_EQ(c.doc["depth"], 3);
  CHECK_EQ(c.doc["terms"].size(), 5);  // start 2 plus three selections

  TempFile cert(c.out);
  RunResult v = run({"verify", cert.path});
  CHECK_EQ(v.code, 0);
  CHECK_EQ(v.doc["results"][0]["verdict"], "valid");
  CHECK_EQ(v.doc["results"][0]["reason"], "");

  SUBCASE("constructions are byte-deterministic") {
    RunResult again = run({"construct", "--w", "1", "--C", "2", "--depth", "3"});
    CHECK_EQ(again.out, c.out);
  }
  SUBCASE("a moved target invalidates the certificate") {
    json doctored = json::parse(c.out);
    doctored["x"] = "1/3";
    TempFile badf(doctored.dump(2));
    RunResult bad = run({"verify", badf.path});
    CHECK_EQ(bad.code, 1);
    CHECK_EQ(bad.doc["results"][0]["verdict"], "invalid");
    CHECK_FALSE(bad.doc["results"][0]["reason"].get<std::string>().empty());
  }
  SUBCASE("stdin works through the dash path") {
    std::istringstream feed(c.out);
    std::streambuf* saved = std::cin.rdbuf(feed.rdbuf());
    RunResult v2 = run({"verify", "-"});
    std::cin.rdbuf(saved);
    CHECK_EQ(v2.code, 0);
    CHECK_EQ(v2.doc["results"][0]["verdict"], "valid");
  }
  SUBCASE("several files aggregate and the worst verdict drives the code") {
    TempFile bad("{}");
    RunResult both = run({"verify", cert.path, bad.path});
    CHECK_EQ(both.code, 1);
    CHECK_EQ(both.doc["results"].size(), 2);
    CHECK_EQ(both.doc["results"][0]["verdict"], "valid");
    CHECK_EQ(both.doc["results"][1]["verdict"], "malformed");
  }
}

TEST_CASE("construct rejects unreachable targets") {
  RunResult r = run({"construct", "--w", "1", "--C", "2", "--depth", "3",
                     "--x", "1/2"});
  CHECK_EQ(r.code, 1);
  CHECK_EQ(r.doc["error"]["type"], "target_outside_range");

  SUBCASE("a too-shallow depth cannot meet the width target") {
    RunResult s = run({"construct", "--w", "1", "--C", "2", "--depth", "1"});
    CHECK_EQ(s.code, 2);
    CHECK_EQ(s.doc["error"]["type"], "precision_cap_exceeded");
  }
}

TEST_CASE("usage and input errors exit 3") {
  RunResult unknown = run({"roots", "--w", "1,1", "--bogus"});
  CHECK_EQ(unknown.code, 3);
  CHECK_FALSE(unknown.err.empty());

  RunResult none = run({});
  CHECK_EQ(none.code, 3);

  RunResult missing = run({"verify", "/nonexistent/cert.json"});
  CHECK_EQ(missing.code, 3);
  CHECK_EQ(missing.doc["error"]["type"], "input_error");

  RunResult badseq = run({"eval", "--w", "1", "--seq", "warp:9"});
  CHECK_EQ(badseq.code, 3);
  CHECK_EQ(badseq.doc["error"]["type"], "usage_error");
}

}
