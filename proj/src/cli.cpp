#include "ahmes/cli.hpp"

#include <cstddef>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ahmes/charpoly.hpp"
#include "ahmes/construct.hpp"
#include "ahmes/diagnostics.hpp"
#include "ahmes/enclosure.hpp"
#include "ahmes/errors.hpp"
#include "ahmes/rational.hpp"
#include "ahmes/schedule.hpp"
#include "ahmes/sequence.hpp"
#include "ahmes/series.hpp"

namespace ahmes {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr unsigned kDecimalDigits = 20;

Rat parse_positive_rational(const std::string& text, const char* what) {
  Rat q;
  try {
    q = parse_rational(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
  if (q <= 0)
    throw std::invalid_argument(std::string(what) + ": must be positive");
  return q;
}

unsigned long parse_ulong(const std::string& text, const char* what) {
  for (char ch : text)
    if (ch < '0' || ch > '9')
      throw std::invalid_argument(std::string(what) + ": expected an integer");
  if (text.empty())
    throw std::invalid_argument(std::string(what) + ": expected an integer");
  try {
    return std::stoul(text);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": integer out of range");
  }
}

// sequence mini-language, shared by --seq and --b:
//   identity | sylvester | constant:V | geometric:B | tower:B,K |
//   list:PATH | beta:C | gamma:C
// The last two build the construction envelope rails for the --w weights.
Sequence parse_sequence_spec(const std::string& spec, const WeightVector& w) {
  std::string head = spec;
  std::string rest;
  if (auto pos = spec.find(':'); pos != std::string::npos) {
    head = spec.substr(0, pos);
    rest = spec.substr(pos + 1);
  }
  auto no_arg = [&]() {
    if (!rest.empty())
      throw std::invalid_argument("sequence '" + head + "' takes no argument");
  };
  auto int_arg = [&](const char* what) {
    if (rest.empty())
      throw std::invalid_argument("sequence '" + head + "' needs an argument");
    try {
      return Int(rest);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(std::string(what) + ": '" + rest +
                                  "' is not an integer");
    }
  };
  if (head == "identity") {
    no_arg();
    return Sequence::identity();
  }
  if (head == "sylvester") {
    no_arg();
    return Sequence::sylvester();
  }
  if (head == "constant") return Sequence::constant(int_arg("constant"));
  if (head == "geometric") return Sequence::geometric(int_arg("geometric"));
  if (head == "tower") {
    auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("tower needs 'tower:BASE,K'");
    Int base;
    try {
      base = Int(rest.substr(0, comma));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("tower base is not an integer");
    }
    unsigned long k = parse_ulong(rest.substr(comma + 1), "tower exponent");
    return Sequence::power_tower(base, k);
  }
  if (head == "list") {
    if (rest.empty()) throw std::invalid_argument("list needs 'list:PATH'");
    return Sequence::from_file(rest);
  }
  if (head == "beta" || head == "gamma") {
    Rat C = parse_positive_rational(rest, "schedule base");
    auto sched = std::make_shared<const Schedule>(w, C);
    return head == "beta" ? Sequence::schedule_beta(std::move(sched))
                          : Sequence::schedule_gamma(std::move(sched));
  }
  throw std::invalid_argument("unknown sequence spec: '" + spec + "'");
}

SeriesInstance build_instance(const std::vector<unsigned long>& wraw,
                              const std::string& seq_spec,
                              const std::string& b_spec) {
  WeightVector w(wraw);
  Sequence a = parse_sequence_spec(seq_spec, w);
  if (b_spec.empty()) return make_series(w, std::move(a));
  Sequence b = parse_sequence_spec(b_spec, w);
  return make_series(w, std::move(a), std::move(b));
}

ojson enclosure_json(const Enclosure& e) {
  ojson j;
  j["lo"] = rational_to_string(e.lo);
  j["hi"] = rational_to_string(e.hi);
  j["width"] = rational_to_string(e.width());
  j["decimal_lo"] = to_decimal_string(e.lo, kDecimalDigits);
  j["decimal_hi"] = to_decimal_string(e.hi, kDecimalDigits);
  return j;
}

ojson report_header(const char* command) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["decimal_note"] =
      "decimal_* fields are rounded renderings; rational strings are "
      "authoritative";
  return j;
}

// plain mode: same numbers, one dotted-path line per leaf
void print_plain(std::ostream& out, const ojson& v, const std::string& path) {
  if (v.is_object()) {
    for (const auto& item : v.items())
      print_plain(out, item.value(),
                  path.empty() ? item.key() : path + "." + item.key());
    return;
  }
  if (v.is_array()) {
    std::size_t i = 0;
    for (const auto& item : v)
      print_plain(out, item, path + "[" + std::to_string(i++) + "]");
    return;
  }
  out << path << ": ";
  if (v.is_string())
    out << v.get<std::string>();
  else
    out << v.dump();
  out << "\n";
}

void emit(std::ostream& out, const ojson& doc, const std::string& format) {
  if (format == "plain")
    print_plain(out, doc, "");
  else
    out << doc.dump(2) << "\n";
}

struct CommonOpts {
  std::vector<unsigned long> w;
  std::string seq;
  std::string b;
  std::string prec;
  std::string format = "json";
};

int cmd_roots(std::ostream& out, const CommonOpts& c, const std::string& poly) {
  WeightVector w(c.w);
  Rat prec = parse_positive_rational(c.prec, "--prec");
  IntPolynomial p;
  RootKind kind;
  std::string poly_name;
  if (poly == "char") {
    p = char_poly(w);
    kind = RootKind::unique_positive;
    poly_name = "char";
  } else if (poly == "tilde" || poly == "companion") {
    p = companion_poly(w);
    kind = RootKind::largest_positive;
    poly_name = "tilde";
  } else {
    throw std::invalid_argument("--poly must be char, tilde, or companion");
  }
  RootEnclosure r = isolate_root(p, kind, Precision(prec, 4096));

  ojson doc = report_header("roots");
  doc["w"] = c.w;
  doc["poly"] = poly_name;
  doc["kind"] = kind == RootKind::unique_positive ? "unique_positive"
                                                  : "largest_positive";
  {
    ojson coeffs = ojson::array();
    for (const Int& cf : p.coeffs) coeffs.push_back(cf.get_str());
    doc["poly_coeffs"] = std::move(coeffs);
  }
  doc["root"] = enclosure_json(r.as_enclosure());
  emit(out, doc, c.format);
  return 0;
}

int cmd_eval(std::ostream& out, const CommonOpts& c) {
  SeriesInstance inst = build_instance(c.w, c.seq, c.b);
  Rat prec = parse_positive_rational(c.prec, "--prec");
  std::size_t terms = 0;
  Enclosure v = eval_series(inst, Precision(prec, 512), &terms);

  ojson doc = report_header("eval");
  doc["w"] = c.w;
  doc["seq"] = inst.a.describe();
  doc["b"] = inst.b.describe();
  doc["value"] = enclosure_json(v);
  doc["terms_used"] = terms;
  emit(out, doc, c.format);
  return 0;
}

int cmd_hypotheses(std::ostream& out, const CommonOpts& c,
                   const std::string& eta_s, const std::string& tau_s,
                   std::size_t horizon) {
  SeriesInstance inst = build_instance(c.w, c.seq, c.b);
  Rat eta = eta_s == "0" ? Rat(0) : parse_positive_rational(eta_s, "--eta");
  Rat tau = parse_positive_rational(tau_s, "--tau");
  HypothesisReport rep = check_hypotheses(inst, eta, tau, horizon);

  ojson doc = report_header("hypotheses");
  doc["w"] = c.w;
  doc["seq"] = inst.a.describe();
  doc["b"] = inst.b.describe();
  doc["eta"] = rational_to_string(rep.eta);
  doc["tau"] = rational_to_string(rep.tau);
  doc["horizon"] = rep.horizon;
  doc["clean"] = rep.clean();
  doc["violations"] = rep.violations;
  emit(out, doc, c.format);
  return rep.clean() ? 0 : 1;
}

int cmd_diagnose(std::ostream& out, const CommonOpts& c, std::size_t horizon,
                 std::size_t gaps, const std::string& peak_window) {
  SeriesInstance inst = build_instance(c.w, c.seq, c.b);
  Rat prec = parse_positive_rational(c.prec, "--prec");
  const std::size_t d = inst.w.d();
  RootEnclosure croot =
      isolate_root(char_poly(inst.w), RootKind::unique_positive,
                   Precision(Rat(1, 1000000000000ul), 4096));

  Precision budget(prec, 512);
  std::vector<Enclosure> mu = mu_sequence(inst, croot, horizon, budget);
  PeakSet pk = peaks(mu);

  ojson doc = report_header("diagnose");
  doc["w"] = c.w;
  doc["seq"] = inst.a.describe();
  doc["b"] = inst.b.describe();
  doc["horizon"] = horizon;
  doc["char_root"] = enclosure_json(croot.as_enclosure());
  {
    ojson arr = ojson::array();
    for (std::size_t i = 0; i < mu.size(); ++i) {
      ojson m;
      m["n"] = i + 1;
      m["mu"] = enclosure_json(mu[i]);
      arr.push_back(std::move(m));
    }
    doc["mu"] = std::move(arr);
  }
  {
    ojson p;
    p["members"] = pk.members;
    p["undecided"] = pk.undecided;
    doc["peaks"] = std::move(p);
  }
  {
    // auto mode ranges over a short ledger and stops at the first index it
    // cannot certify (finite list exhausted, no tail certificate); an
    // explicit --gaps request keeps the hard error instead
    bool auto_gaps = gaps == 0;
    std::size_t upto = auto_gaps ? std::min(horizon, d + 8) : gaps;
    ojson arr = ojson::array();
    for (std::size_t N = d; N <= upto; ++N) {
      MahlerGapReport rep;
      try {
        rep = mahler_gap(inst, N, budget);
      } catch (const NoCertificate&) {
        if (!auto_gaps) throw;
        break;
      } catch (const IndexBeyondHorizon&) {
        if (!auto_gaps) throw;
        break;
      }
      ojson g;
      g["N"] = rep.N;
      g["clearing_factor"] = rep.clearing_factor.get_str();
      g["partial_integral"] = rep.partial_integral;
      g["gap"] = enclosure_json(rep.gap);
      g["reduced_denominator"] = rep.reduced_denominator.get_str();
      g["reduced_gap"] = enclosure_json(rep.reduced_gap);
      arr.push_back(std::move(g));
    }
    doc["mahler"] = std::move(arr);
  }
  if (!peak_window.empty()) {
    auto comma = peak_window.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("--peak needs 'P,Q'");
    std::size_t P = parse_ulong(peak_window.substr(0, comma), "--peak P");
    std::size_t Q = parse_ulong(peak_window.substr(comma + 1), "--peak Q");
    LocalPeakVerdict v = local_peak_check(inst, P, Q, croot, budget);
    const char* name = v == LocalPeakVerdict::holds            ? "holds"
                       : v == LocalPeakVerdict::fails          ? "fails"
                       : v == LocalPeakVerdict::hypothesis_not_met
                           ? "hypothesis_not_met"
                           : "undecided";
    ojson lp;
    lp["P"] = P;
    lp["Q"] = Q;
    lp["verdict"] = name;
    doc["local_peak"] = std::move(lp);
  }
  emit(out, doc, c.format);
  return 0;
}

int cmd_construct(std::ostream& out, const CommonOpts& c, const std::string& C_s,
                  const std::string& x_s, std::size_t depth) {
  WeightVector w(c.w);
  Rat C = parse_positive_rational(C_s, "--C");
  Rat prec = parse_positive_rational(c.prec, "--prec");
  ConstructionResult res =
      x_s == "mid"
          ? construct_midpoint(w, C, depth, Precision(prec, 64))
          : construct(w, C, parse_positive_rational(x_s, "--x"), depth,
                      Precision(prec, 64));
  if (c.format == "plain") {
    ojson doc = report_header("construct");
    doc["w"] = c.w;
    doc["C"] = rational_to_string(C);
    doc["x"] = rational_to_string(res.cert.x);
    doc["depth"] = res.cert.depth;
    doc["repair_end"] = res.cert.repair_end;
    doc["start"] = res.cert.start;
    doc["terms"] = res.cert.terms.size();
    doc["final_width"] = rational_to_string(res.cert.final_width);
    doc["final_width_decimal"] =
        to_decimal_string(res.cert.final_width, kDecimalDigits);
    emit(out, doc, c.format);
  } else {
    // the certificate itself is the result document (pipeable into verify)
    out << certificate_to_json(res.cert);
  }
  return 0;
}

int cmd_verify(std::ostream& out, const std::vector<std::string>& paths,
               const std::string& format) {
  ojson results = ojson::array();
  bool any_invalid = false;
  bool any_undecided = false;
  for (const std::string& path : paths) {
    std::string text;
    if (path == "-") {
      std::ostringstream buf;
      buf << std::cin.rdbuf();
      text = buf.str();
    } else {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open certificate: " + path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    ojson r;
    r["path"] = path;
    try {
      VerifyReport rep = verify_certificate_text(text);
      switch (rep.verdict) {
        case VerifyVerdict::valid:
          r["verdict"] = "valid";
          break;
        case VerifyVerdict::invalid:
          r["verdict"] = "invalid";
          any_invalid = true;
          break;
        case VerifyVerdict::undecided:
          r["verdict"] = "undecided";
          any_undecided = true;
          break;
      }
      r["reason"] = rep.reason;
    } catch (const MalformedCertificate& e) {
      r["verdict"] = "malformed";
      r["reason"] = e.what();
      any_invalid = true;
    }
    results.push_back(std::move(r));
  }
  ojson doc = report_header("verify");
  doc["results"] = std::move(results);
  emit(out, doc, format);
  if (any_invalid) return 1;
  if (any_undecided) return 2;
  return 0;
}

int error_exit(std::ostream& out, std::ostream& err, const std::string& format,
               const char* type, const std::string& message, int code) {
  ojson doc;
  doc["schema_version"] = kSchemaVersion;
  ojson e;
  e["type"] = type;
  e["message"] = message;
  doc["error"] = std::move(e);
  emit(out, doc, format);
  err << type << ": " << message << "\n";
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"certified diagnostics and rational-sum construction for "
               "weighted reciprocal series"};
  app.require_subcommand(1);

  CommonOpts c;
  std::string poly = "char";
  std::string eta = "0";
  std::string tau;
  std::size_t horizon = 1000;
  std::size_t diag_horizon = 10;
  std::size_t gaps = 0;
  std::string peak_window;
  std::string C_s;
  std::string x_s = "mid";
  std::size_t depth = 0;
  std::vector<std::string> paths;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"json", "plain"}));
  };
  auto add_w = [&](CLI::App* sub) {
    sub->add_option("--w", c.w, "weight vector, comma separated")
        ->delimiter(',')
        ->required();
  };
  auto add_series = [&](CLI::App* sub) {
    sub->add_option("--seq", c.seq, "term sequence spec")->required();
    sub->add_option("--b", c.b, "numerator sequence spec (default: all ones)");
  };

  CLI::App* roots = app.add_subcommand("roots", "isolate a weight-polynomial root");
  add_w(roots);
  roots->add_option("--poly", poly, "char | tilde (companion accepted)");
  c.prec = "1e-12";
  roots->add_option("--prec", c.prec, "target enclosure width");
  add_format(roots);

  CLI::App* eval = app.add_subcommand("eval", "enclose the series value");
  add_w(eval);
  add_series(eval);
  eval->add_option("--prec", c.prec, "target enclosure width");
  add_format(eval);

  CLI::App* hyp =
      app.add_subcommand("hypotheses", "check the growth hypotheses exactly");
  add_w(hyp);
  add_series(hyp);
  hyp->add_option("--eta", eta, "numerator growth exponent bound");
  hyp->add_option("--tau", tau, "required surplus growth exponent")->required();
  hyp->add_option("--horizon", horizon, "largest index checked");
  add_format(hyp);

  CLI::App* diag = app.add_subcommand(
      "diagnose", "mu values, peak set, and integrality gap ledger");
  add_w(diag);
  add_series(diag);
  diag->add_option("--horizon", diag_horizon, "mu/peak horizon");
  diag->add_option("--gaps", gaps, "largest ledger index N (default: auto)");
  diag->add_option("--peak", peak_window, "window 'P,Q' for the local peak check");
  diag->add_option("--prec", c.prec, "target enclosure width");
  add_format(diag);

  CLI::App* cons = app.add_subcommand(
      "construct", "build a certified sequence whose series sums to x");
  add_w(cons);
  cons->add_option("--C", C_s, "growth base, rational > 1")->required();
  cons->add_option("--x", x_s, "target value 'p/q', or 'mid' for the midpoint");
  cons->add_option("--depth", depth, "number of certified selections")
      ->required();
  cons->add_option("--prec", c.prec, "required final bracket width");
  add_format(cons);

  CLI::App* ver =
      app.add_subcommand("verify", "replay certificates and report verdicts");
  ver->add_option("paths", paths, "certificate files ('-' reads stdin)");
  add_format(ver);

  // subcommand-specific precision defaults
  eval->preparse_callback([&](std::size_t) { c.prec = "1e-30"; });
  diag->preparse_callback([&](std::size_t) { c.prec = "1e-6"; });
  cons->preparse_callback([&](std::size_t) { c.prec = "1e-20"; });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ahmes");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int cli_code = app.exit(e, out, err);
    return cli_code == 0 ? 0 : 3;
  }

  try {
    if (roots->parsed()) return cmd_roots(out, c, poly);
    if (eval->parsed()) return cmd_eval(out, c);
    if (hyp->parsed()) return cmd_hypotheses(out, c, eta, tau, horizon);
    if (diag->parsed())
      return cmd_diagnose(out, c, diag_horizon, gaps, peak_window);
    if (cons->parsed()) return cmd_construct(out, c, C_s, x_s, depth);
    if (ver->parsed()) {
      if (paths.empty()) paths.push_back("-");
      return cmd_verify(out, paths, c.format);
    }
    err << "no subcommand selected\n";
    return 3;
  } catch (const TargetOutsideRange& e) {
    return error_exit(out, err, c.format, "target_outside_range", e.what(), 1);
  } catch (const CoverageViolated& e) {
    return error_exit(out, err, c.format, "coverage_violated", e.what(), 1);
  } catch (const IsolationFailed& e) {
    return error_exit(out, err, c.format, "isolation_failed", e.what(), 1);
  } catch (const MalformedCertificate& e) {
    return error_exit(out, err, c.format, "malformed_certificate", e.what(), 1);
  } catch (const PrecisionCapExceeded& e) {
    return error_exit(out, err, c.format, "precision_cap_exceeded", e.what(), 2);
  } catch (const FloorUndecidable& e) {
    return error_exit(out, err, c.format, "floor_undecidable", e.what(), 2);
  } catch (const SelectionUndecidable& e) {
    return error_exit(out, err, c.format, "selection_undecidable", e.what(), 2);
  } catch (const NoCertificate& e) {
    return error_exit(out, err, c.format, "no_certificate", e.what(), 2);
  } catch (const Error& e) {
    return error_exit(out, err, c.format, "certification_failure", e.what(), 1);
  } catch (const std::invalid_argument& e) {
    return error_exit(out, err, c.format, "usage_error", e.what(), 3);
  } catch (const std::runtime_error& e) {
    return error_exit(out, err, c.format, "input_error", e.what(), 3);
  }
}

}  // namespace ahmes
