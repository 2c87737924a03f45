#include "ahmes/construct.hpp"

#include <algorithm>
#include <cctype>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ahmes/errors.hpp"
#include "ahmes/rational.hpp"

namespace ahmes {

namespace {

using ojson = nlohmann::ordered_json;

// Same cap as the series evaluator: refuse to materialize window products
// past this many bits instead of grinding the machine to a halt.
constexpr unsigned long kMaxWindowBits = 1ul << 26;

// Tail segments are lengthened geometrically: H = d * 2^j. Seven rungs is
// plenty; each rung shrinks the remainder by many orders of magnitude and
// the window-bit cap is reached long before the ladder runs out on the
// fast-growing schedules.
constexpr int kTailRungs = 7;

constexpr int kNewtonBudget = 200;
constexpr int kWalkBudget = 64;
constexpr int kSelectionBudget = 256;

Int checked_pow(const Int& v, unsigned long e) {
  if (e == 0) return Int(1);
  unsigned long bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  if (bits > kMaxWindowBits / e)
    throw PrecisionCapExceeded("construction window product exceeds bit cap");
  return pow_int(v, e);
}

// a_i as seen by the hybrid sum: recorded prefix first, then the chosen
// envelope rail forever.
Int hybrid_value(const Schedule& s, const std::vector<Int>& terms,
                 TailKind kind, std::size_t i) {
  if (i == 0) throw std::invalid_argument("hybrid_value: indices start at 1");
  if (i <= terms.size()) return terms[i - 1];
  return kind == TailKind::beta_tail ? s.beta(i) : s.gamma(i);
}

// x_n = a_{n-d+1}^{w_0} ... a_n^{w_{d-1}} over the hybrid sequence.
Int window_product(const Schedule& s, const std::vector<Int>& terms,
                   TailKind kind, std::size_t n) {
  const WeightVector& w = s.weights();
  const std::size_t d = w.d();
  Int prod(1);
  for (std::size_t j = 0; j < d; ++j)
    prod *= checked_pow(hybrid_value(s, terms, kind, n - d + 1 + j), w.at(j));
  return prod;
}

Rat tail_step_rho(const Schedule& s, std::size_t m0) {
  Rat r = s.envelope_step_ratio(m0);
  long k = static_cast<long>(s.weights().total().get_ui());
  Rat rho = pow_rat(r, k);
  if (rho >= 1)
    throw NoCertificate("hybrid tail: step ratio does not contract");
  return rho;
}

// Exact endpoints [P + t_head, P + B] enclosing the infinite hybrid sum:
// P is the exact partial through N + H, t_head the next term, and
// B = t_head / (1 - rho) the geometric remainder bound. H >= d keeps every
// ratio in the remainder between pure rail indices, which is what the
// envelope step bound covers.
std::pair<Rat, Rat> exact_bracket(const Schedule& s,
                                  const std::vector<Int>& terms, TailKind kind,
                                  std::size_t H) {
  const std::size_t d = s.weights().d();
  const std::size_t N = terms.size();
  if (H < d) throw std::invalid_argument("exact_bracket: tail_terms >= d");
  if (N < d) throw std::invalid_argument("exact_bracket: prefix shorter than d");
  Rat P(0);
  for (std::size_t n = d; n <= N + H; ++n)
    P += Rat(1) / Rat(window_product(s, terms, kind, n));
  Rat t_head = Rat(1) / Rat(window_product(s, terms, kind, N + H + 1));
  Rat rho = tail_step_rho(s, N + H + 2 - d);
  Rat B = t_head / (Rat(1) - rho);
  return {P + t_head, P + B};
}

// The candidate a_{N+1} enters the sum only through the d window products
// x_{N+1}, ..., x_{N+d}, each as a factor a^{w_{d-i}}. Splitting those off
// gives the whole rail bracket as an explicit function of the candidate:
//   lo(a) = lo_base + sum_i coeff_i * a^(-exp_i),   same pows for hi.
// Selection evaluates this dozens of times per step, so the constant part
// is computed once.
struct RailProfile {
  Rat lo_base;
  Rat hi_base;
  std::vector<std::pair<Rat, unsigned long>> pows;
};

RailProfile build_profile(const Schedule& s, const std::vector<Int>& terms,
                          TailKind kind, std::size_t H, bool with_tail) {
  const WeightVector& w = s.weights();
  const std::size_t d = w.d();
  const std::size_t N = terms.size();
  if (H < d) throw std::invalid_argument("build_profile: tail_terms >= d");
  if (N < d) throw std::invalid_argument("build_profile: prefix shorter than d");
  const std::size_t cand_pos = N + 1;
  // positions other than cand_pos come from the prefix or the rail
  auto val = [&](std::size_t i) { return hybrid_value(s, terms, kind, i); };

  Rat base(0);
  for (std::size_t n = d; n <= N; ++n)
    base += Rat(1) / Rat(window_product(s, terms, kind, n));

  std::vector<std::pair<Rat, unsigned long>> pows;
  for (std::size_t i = 1; i <= d; ++i) {
    const std::size_t n = N + i;
    const unsigned long e = w.at(d - i);
    Int other(1);
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t pos = n - d + 1 + j;
      if (pos == cand_pos) continue;
      other *= checked_pow(val(pos), w.at(j));
    }
    if (e == 0)
      base += Rat(1) / Rat(other);
    else
      pows.emplace_back(Rat(1) / Rat(other), e);
  }
  for (std::size_t n = N + d + 1; n <= N + H; ++n)
    base += Rat(1) / Rat(window_product(s, terms, kind, n));

  if (!with_tail) return {base, base, std::move(pows)};
  Rat t_head = Rat(1) / Rat(window_product(s, terms, kind, N + H + 1));
  Rat rho = tail_step_rho(s, N + H + 2 - d);
  Rat B = t_head / (Rat(1) - rho);
  return {base + t_head, base + B, std::move(pows)};
}

Rat profile_terms(const RailProfile& p, const Int& a) {
  Rat sum(0);
  for (const auto& [c, e] : p.pows) sum += c / Rat(checked_pow(a, e));
  return sum;
}

// |d/da| of the candidate-dependent part, exact.
Rat profile_slope_mag(const RailProfile& p, const Int& a) {
  Rat sum(0);
  for (const auto& [c, e] : p.pows)
    sum += c * Rat(e) / Rat(checked_pow(a, e + 1));
  return sum;
}

// One left-sided Newton step toward the solution of lo(a) = x. The profile
// is convex and decreasing in a, so starting left of the crossing every
// step lands left of it as well; flooring only ever moves further left.
Int newton_jump(const RailProfile& p, const Rat& x, const Int& a) {
  Rat fa = p.lo_base + profile_terms(p, a);
  if (fa <= x) return a;
  Rat mag = profile_slope_mag(p, a);
  if (mag == 0) return a;
  return floor_rat(Rat(a) + (fa - x) / mag);
}

Enclosure record_enclosure(const Rat& lo, const Rat& hi) {
  return Enclosure(round_down_dyadic(lo, kBracketRecordBits),
                   round_up_dyadic(hi, kBracketRecordBits));
}

struct RungData {
  RailProfile gamma;
  RailProfile beta;
};

using RungCache = std::map<std::size_t, RungData>;

const RungData* rung_profiles(const Schedule& s, const std::vector<Int>& terms,
                              std::size_t H, RungCache& cache) {
  auto it = cache.find(H);
  if (it == cache.end()) {
    RungData data{build_profile(s, terms, TailKind::gamma_tail, H, true),
                  build_profile(s, terms, TailKind::beta_tail, H, true)};
    it = cache.emplace(H, std::move(data)).first;
  }
  return &it->second;
}

enum class CandVerdict { accept, reject, coverage_gap, undecided };

struct CertifyResult {
  CandVerdict verdict = CandVerdict::undecided;
  std::size_t tail_terms = 0;
  Enclosure lower;
  Enclosure upper;
};

// Three-way decision for one candidate, walking the tail ladder until the
// enclosures separate from x. Every inequality is between exact rationals
// and every endpoint moves monotonically as H grows (lower endpoints rise,
// upper endpoints fall), so the rung that first decides is canonical: a
// verifier rerunning this loop lands on the same H with the same values.
CertifyResult certify_candidate(const Schedule& s,
                                const std::vector<Int>& terms, const Rat& x,
                                const Int& cand, const Int& beta_at_idx,
                                RungCache& cache) {
  const std::size_t d = s.weights().d();
  for (int j = 0; j < kTailRungs; ++j) {
    const std::size_t H = d << j;
    const RungData* rd = nullptr;
    try {
      rd = rung_profiles(s, terms, H, cache);
    } catch (const NoCertificate&) {
      continue;  // remainder not yet contracting; a longer tail fixes it
    } catch (const PrecisionCapExceeded&) {
      break;  // longer tails only get bigger
    }
    Rat sg = profile_terms(rd->gamma, cand);
    Rat lo_g = rd->gamma.lo_base + sg;
    if (lo_g > x) return {CandVerdict::reject, H, {}, {}};
    Rat hi_g = rd->gamma.hi_base + sg;
    Rat sb = profile_terms(rd->beta, cand);
    Rat lo_b = rd->beta.lo_base + sb;
    Rat hi_b = rd->beta.hi_base + sb;
    if (hi_b < x) return {CandVerdict::coverage_gap, H, {}, {}};
    bool main_ok = hi_g <= x && x <= lo_b;
    if (main_ok) {
      bool min_ok = cand == beta_at_idx;
      if (!min_ok) {
        Rat lo_g_prev = rd->gamma.lo_base + profile_terms(rd->gamma, cand - 1);
        min_ok = lo_g_prev > x;
      }
      if (min_ok)
        return {CandVerdict::accept, H, record_enclosure(lo_g, hi_g),
                record_enclosure(lo_b, hi_b)};
    }
  }
  return {CandVerdict::undecided, 0, {}, {}};
}

struct SeedDecision {
  enum class Kind { inside, below, above, undecided };
  Kind kind = Kind::undecided;
  std::size_t tail_terms = 0;
  Enclosure lower;
  Enclosure upper;
};

// Strict version of the same ladder for the canonical prefix: x must land
// strictly between the two rail sums before any selection starts.
SeedDecision seed_decide(const Schedule& s, const std::vector<Int>& terms,
                         const Rat& x) {
  const std::size_t d = s.weights().d();
  for (int j = 0; j < kTailRungs; ++j) {
    const std::size_t H = d << j;
    Rat lo_g, hi_g, lo_b, hi_b;
    try {
      std::tie(lo_g, hi_g) = exact_bracket(s, terms, TailKind::gamma_tail, H);
      std::tie(lo_b, hi_b) = exact_bracket(s, terms, TailKind::beta_tail, H);
    } catch (const NoCertificate&) {
      continue;
    } catch (const PrecisionCapExceeded&) {
      break;
    }
    if (x < lo_g)
      return {SeedDecision::Kind::below, H, {}, {}};
    if (x > hi_b)
      return {SeedDecision::Kind::above, H, {}, {}};
    if (hi_g < x && x < lo_b)
      return {SeedDecision::Kind::inside, H, record_enclosure(lo_g, hi_g),
              record_enclosure(lo_b, hi_b)};
  }
  return {};
}

struct Layout {
  std::size_t repair_end = 0;
  std::size_t covering_from = 0;
  std::size_t start = 0;
  std::size_t covering_through = 0;
  std::size_t monotone_through = 0;
};

// Finds where the repaired sequence can hand over to the schedule: the
// junction must keep the terms strictly increasing, and selection may only
// begin once the covering inequality is certified and keeps holding through
// the last selection step. The two scans restart past any failure, so the
// result is the least layout that passes all window checks (and therefore
// replays deterministically).
Layout derive_layout(const Schedule& s, std::size_t depth) {
  const std::size_t d = s.weights().d();
  std::size_t mono_scan_from = 1;
  std::size_t cov_scan_from = d;
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::size_t n0 = 0;
    for (std::size_t n = mono_scan_from; n < mono_scan_from + 64; ++n) {
      if (s.beta(n) > Int(n) - 1 && s.gamma(n) < s.beta(n + 1)) {
        n0 = n;
        break;
      }
    }
    if (n0 == 0)
      throw NoCertificate("layout: no admissible junction in scan window");

    std::size_t cov_lo = std::max({d, n0 + d - 2, cov_scan_from});
    std::size_t M = 0;
    for (std::size_t N = cov_lo; N < cov_lo + 64; ++N) {
      if (covering_check(s, N) == CoverVerdict::pass) {
        M = N;
        break;
      }
    }
    if (M == 0)
      throw NoCertificate("layout: covering never certified in scan window");

    std::size_t start = std::max({M, n0 + d - 2, d});
    std::size_t covering_through = start + depth - 1;
    std::size_t monotone_through = start + depth + d;

    bool redo = false;
    for (std::size_t m = n0; m <= monotone_through; ++m) {
      if (!(s.gamma(m) < s.beta(m + 1))) {
        mono_scan_from = m + 1;
        redo = true;
        break;
      }
    }
    if (redo) continue;
    for (std::size_t N = M; N <= covering_through; ++N) {
      if (covering_check(s, N) != CoverVerdict::pass) {
        cov_scan_from = N + 1;
        redo = true;
        break;
      }
    }
    if (redo) continue;
    return {n0, M, start, covering_through, monotone_through};
  }
  throw NoCertificate("layout: scan budget exhausted");
}

std::vector<std::string> canonical_assumptions(std::size_t covering_through,
                                               std::size_t monotone_through,
                                               bool beyond_certified) {
  std::vector<std::string> out;
  out.push_back("selection steps beyond N = " + std::to_string(covering_through) +
                " assume the bracket-overlap inequality");
  if (!beyond_certified)
    out.push_back("envelope floors beyond m = " + std::to_string(monotone_through) +
                  " assumed strictly separated");
  return out;
}

void require_seeded(const ConstructionState& st, const char* who) {
  if (!st.sched) throw std::invalid_argument(std::string(who) + ": empty state");
  const std::size_t d = st.sched->weights().d();
  if (st.terms.size() < st.start || st.start < d)
    throw std::invalid_argument(std::string(who) + ": state not seeded");
}

}  // namespace

Enclosure bracket_at(const ConstructionState& st, TailKind kind,
                     std::size_t tail_terms) {
  require_seeded(st, "bracket_at");
  auto [lo, hi] = exact_bracket(*st.sched, st.terms, kind, tail_terms);
  return record_enclosure(lo, hi);
}

Enclosure bracket(const ConstructionState& st, TailKind kind,
                  const Precision& prec) {
  require_seeded(st, "bracket");
  const std::size_t d = st.sched->weights().d();
  bool any = false;
  for (int j = 0; j < kTailRungs; ++j) {
    Enclosure e;
    try {
      e = bracket_at(st, kind, d << j);
    } catch (const NoCertificate&) {
      continue;
    }
    any = true;
    if (e.width() <= prec.target_width) return e;
  }
  if (!any) throw NoCertificate("bracket: no tail length certifies a remainder");
  throw PrecisionCapExceeded("bracket: width target unreachable on the record grid");
}

std::pair<Enclosure, Enclosure> attainable_interval(const ConstructionState& st,
                                                    const Precision& prec) {
  require_seeded(st, "attainable_interval");
  const std::size_t d = st.sched->weights().d();
  bool any = false;
  for (int j = 0; j < kTailRungs; ++j) {
    const std::size_t H = d << j;
    Rat lo_g, hi_g, lo_b, hi_b;
    try {
      std::tie(lo_g, hi_g) = exact_bracket(*st.sched, st.terms, TailKind::gamma_tail, H);
      std::tie(lo_b, hi_b) = exact_bracket(*st.sched, st.terms, TailKind::beta_tail, H);
    } catch (const NoCertificate&) {
      continue;
    }
    any = true;
    Enclosure lower = record_enclosure(lo_g, hi_g);
    Enclosure upper = record_enclosure(lo_b, hi_b);
    if (lower.width() <= prec.target_width && upper.width() <= prec.target_width)
      return {lower, upper};
  }
  if (!any)
    throw NoCertificate("attainable_interval: no tail length certifies a remainder");
  throw PrecisionCapExceeded("attainable_interval: width target unreachable");
}

Int construct_next(ConstructionState& st) {
  require_seeded(st, "construct_next");
  const Schedule& s = *st.sched;
  const std::size_t idx = st.terms.size() + 1;
  const Int b = s.beta(idx);
  const Int g = s.gamma(idx);
  const std::size_t d = s.weights().d();

  // Cheap approach phase: Newton on the tail-free profile. It bounds the
  // certified lower endpoint from below, so its crossing sits left of the
  // certified one and every floored step keeps the iterate left of both.
  Int cand = b;
  {
    RailProfile raw = build_profile(s, st.terms, TailKind::gamma_tail, d, false);
    for (int it = 0; it < kNewtonBudget; ++it) {
      if (raw.lo_base + profile_terms(raw, cand) <= st.x) break;
      Int next = newton_jump(raw, st.x, cand);
      if (next <= cand) break;
      if (next >= g) {
        cand = g;
        break;
      }
      cand = next;
    }
  }

  // Certified phase: decide the current candidate; on a certified reject,
  // jump with the rung's own profile (still from the left) and fall back to
  // unit steps when the jump stalls.
  RungCache cache;
  int unit_steps = 0;
  for (int it = 0; it < kSelectionBudget; ++it) {
    CertifyResult res = certify_candidate(s, st.terms, st.x, cand, b, cache);
    switch (res.verdict) {
      case CandVerdict::accept:
        st.ledger.push_back({idx, cand, res.lower, res.upper, res.tail_terms});
        st.terms.push_back(cand);
        return cand;
      case CandVerdict::coverage_gap:
        throw CoverageViolated("construct: no admissible value at index " +
                               std::to_string(idx) + " reaches the target");
      case CandVerdict::undecided:
        throw SelectionUndecidable(
            "construct: target within enclosure slack at index " +
            std::to_string(idx));
      case CandVerdict::reject: {
        const RungData* rd = rung_profiles(s, st.terms, res.tail_terms, cache);
        Int next = newton_jump(rd->gamma, st.x, cand);
        if (next <= cand) {
          next = cand + 1;
          if (++unit_steps > kWalkBudget)
            throw SelectionUndecidable(
                "construct: unit-step budget exhausted at index " +
                std::to_string(idx));
        }
        if (next > g)
          throw CoverageViolated("construct: selection ran past gamma at index " +
                                 std::to_string(idx));
        cand = next;
        break;
      }
    }
  }
  throw SelectionUndecidable("construct: selection budget exhausted at index " +
                             std::to_string(idx));
}

namespace {

ConstructionResult construct_impl(const WeightVector& w, const Rat& C,
                                  std::optional<Rat> x_opt, std::size_t depth,
                                  const Precision& prec) {
  if (depth == 0) throw std::invalid_argument("construct: depth >= 1 required");
  auto sched = std::make_shared<const Schedule>(w, C);
  const Schedule& s = *sched;
  const std::size_t d = w.d();

  Layout L = derive_layout(s, depth);

  std::vector<Int> terms;
  for (std::size_t m = 1; m < L.repair_end; ++m) terms.emplace_back(m);
  for (std::size_t m = L.repair_end; m <= L.start; ++m) terms.push_back(s.beta(m));

  Rat x;
  if (x_opt) {
    x = *x_opt;
  } else {
    // midpoint of the first certifiable seed bracket, taken on the record
    // grid so the certificate target stays compact
    bool found = false;
    for (int j = 0; j < kTailRungs && !found; ++j) {
      Rat lo_g, hi_g, lo_b, hi_b;
      try {
        std::tie(lo_g, hi_g) = exact_bracket(s, terms, TailKind::gamma_tail, d << j);
        std::tie(lo_b, hi_b) = exact_bracket(s, terms, TailKind::beta_tail, d << j);
      } catch (const NoCertificate&) {
        continue;
      }
      // short tails can leave the two rails overlapping; longer tails
      // widen the gap, so climb until the exact endpoints clear each other
      if (hi_g >= lo_b) continue;
      // snap onto a dyadic grid fine enough for the gap at hand; heavy
      // weight vectors can open with gaps far below the record grid
      long gapbits = floor_log2(Rat(1) / (lo_b - hi_g));
      unsigned long grid = kBracketRecordBits;
      if (gapbits > 0 && static_cast<unsigned long>(gapbits) + 16 > grid)
        grid = static_cast<unsigned long>(gapbits) + 16;
      Rat gu = round_up_dyadic(hi_g, grid);
      Rat bl = round_down_dyadic(lo_b, grid);
      if (gu >= bl) continue;
      x = (gu + bl) / 2;
      found = true;
    }
    if (!found)
      throw NoCertificate("construct: no tail length certifies the seed bracket");
  }

  SeedDecision sd = seed_decide(s, terms, x);
  switch (sd.kind) {
    case SeedDecision::Kind::below:
      throw TargetOutsideRange("construct: x below the attainable interval");
    case SeedDecision::Kind::above:
      throw TargetOutsideRange("construct: x above the attainable interval");
    case SeedDecision::Kind::undecided:
      throw SelectionUndecidable(
          "construct: x cannot be separated from the attainable boundary");
    case SeedDecision::Kind::inside:
      break;
  }

  ConstructionState st{sched, std::move(terms), L.repair_end, L.start,
                       L.covering_from, x, {}};
  st.ledger.push_back({L.start, Int(0), sd.lower, sd.upper, sd.tail_terms});
  for (std::size_t k = 0; k < depth; ++k) construct_next(st);

  bool beyond = s.monotone_beyond(L.monotone_through);

  Certificate cert;
  cert.version = 1;
  cert.w = w.raw();
  cert.growth_base = C;
  cert.x = x;
  cert.depth = depth;
  cert.c_tilde = s.companion().as_enclosure();
  cert.c_tilde_eps = s.companion_eps();
  cert.repair_end = L.repair_end;
  cert.start = L.start;
  cert.covering_from = L.covering_from;
  cert.covering_through = L.covering_through;
  cert.monotone_through = L.monotone_through;
  cert.monotone_beyond_certified = beyond;
  cert.assumptions =
      canonical_assumptions(L.covering_through, L.monotone_through, beyond);
  cert.terms = st.terms;
  cert.brackets = st.ledger;
  cert.final_width = st.ledger.back().upper.hi - st.ledger.back().lower.lo;
  if (cert.final_width > prec.target_width)
    throw PrecisionCapExceeded(
        "construct: final bracket wider than the requested target");

  Sequence seq = Sequence::constructed(st.terms, sched, L.repair_end);
  return {std::move(seq), std::move(cert), std::move(st)};
}

}  // namespace

ConstructionResult construct(const WeightVector& w, const Rat& C, const Rat& x,
                             std::size_t depth, const Precision& prec) {
  return construct_impl(w, C, x, depth, prec);
}

ConstructionResult construct_midpoint(const WeightVector& w, const Rat& C,
                                      std::size_t depth, const Precision& prec) {
  return construct_impl(w, C, std::nullopt, depth, prec);
}

namespace {

ojson enclosure_to_json(const Enclosure& e) {
  ojson j;
  j["lo"] = rational_to_string(e.lo);
  j["hi"] = rational_to_string(e.hi);
  return j;
}

const ojson& need_field(const ojson& o, const char* key, const char* where) {
  if (!o.contains(key))
    throw MalformedCertificate(std::string("missing field '") + key + "' in " +
                               where);
  return o.at(key);
}

void reject_unknown(const ojson& o, std::initializer_list<const char*> keys,
                    const char* where) {
  for (const auto& item : o.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw MalformedCertificate("unknown field '" + item.key() + "' in " +
                                 where);
  }
}

std::size_t json_index(const ojson& v, const char* what) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw MalformedCertificate(std::string(what) + ": expected an integer");
  long long t = v.get<long long>();
  if (t < 0) throw MalformedCertificate(std::string(what) + ": negative");
  return static_cast<std::size_t>(t);
}

Rat json_rat(const ojson& v, const char* what) {
  if (!v.is_string())
    throw MalformedCertificate(std::string(what) + ": expected a string");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const std::exception& e) {
    throw MalformedCertificate(std::string(what) + ": " + e.what());
  }
}

Int json_int(const ojson& v, const char* what) {
  if (!v.is_string())
    throw MalformedCertificate(std::string(what) + ": expected a string");
  const std::string s = v.get<std::string>();
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size())
    throw MalformedCertificate(std::string(what) + ": not an integer");
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw MalformedCertificate(std::string(what) + ": not an integer");
  return Int(s);
}

Enclosure json_enclosure(const ojson& v, const char* where) {
  if (!v.is_object())
    throw MalformedCertificate(std::string(where) + ": expected an object");
  reject_unknown(v, {"lo", "hi"}, where);
  Rat lo = json_rat(need_field(v, "lo", where), where);
  Rat hi = json_rat(need_field(v, "hi", where), where);
  try {
    return Enclosure(lo, hi);
  } catch (const std::invalid_argument& e) {
    throw MalformedCertificate(std::string(where) + ": " + e.what());
  }
}

}  // namespace

std::string certificate_to_json(const Certificate& cert) {
  ojson j;
  j["version"] = cert.version;
  j["w"] = cert.w;
  j["C"] = rational_to_string(cert.growth_base);
  j["x"] = rational_to_string(cert.x);
  j["depth"] = cert.depth;
  j["c_tilde"] = enclosure_to_json(cert.c_tilde);
  j["c_tilde_eps"] = rational_to_string(cert.c_tilde_eps);
  j["repair_end"] = cert.repair_end;
  j["start"] = cert.start;
  j["covering_from"] = cert.covering_from;
  j["covering_through"] = cert.covering_through;
  j["monotone_through"] = cert.monotone_through;
  j["monotone_beyond_certified"] = cert.monotone_beyond_certified;
  j["assumptions"] = cert.assumptions;
  {
    ojson arr = ojson::array();
    for (const Int& t : cert.terms) arr.push_back(t.get_str());
    j["terms"] = std::move(arr);
  }
  {
    ojson arr = ojson::array();
    for (const BracketEntry& e : cert.brackets) {
      ojson b;
      b["n"] = e.n;
      b["term"] = e.term.get_str();
      b["lower"] = enclosure_to_json(e.lower);
      b["upper"] = enclosure_to_json(e.upper);
      b["tail_terms"] = e.tail_terms;
      arr.push_back(std::move(b));
    }
    j["brackets"] = std::move(arr);
  }
  j["final_width"] = rational_to_string(cert.final_width);
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw MalformedCertificate(std::string("certificate is not valid JSON: ") +
                               e.what());
  }
  if (!j.is_object())
    throw MalformedCertificate("certificate must be a JSON object");
  reject_unknown(j,
                 {"version", "w", "C", "x", "depth", "c_tilde", "c_tilde_eps",
                  "repair_end", "start", "covering_from", "covering_through",
                  "monotone_through", "monotone_beyond_certified", "assumptions",
                  "terms", "brackets", "final_width"},
                 "certificate");

  Certificate cert;
  cert.version = static_cast<int>(json_index(need_field(j, "version", "certificate"), "version"));

  const ojson& jw = need_field(j, "w", "certificate");
  if (!jw.is_array()) throw MalformedCertificate("w: expected an array");
  for (const auto& v : jw)
    cert.w.push_back(json_index(v, "w entry"));

  cert.growth_base = json_rat(need_field(j, "C", "certificate"), "C");
  cert.x = json_rat(need_field(j, "x", "certificate"), "x");
  cert.depth = json_index(need_field(j, "depth", "certificate"), "depth");
  cert.c_tilde = json_enclosure(need_field(j, "c_tilde", "certificate"), "c_tilde");
  cert.c_tilde_eps =
      json_rat(need_field(j, "c_tilde_eps", "certificate"), "c_tilde_eps");
  cert.repair_end =
      json_index(need_field(j, "repair_end", "certificate"), "repair_end");
  cert.start = json_index(need_field(j, "start", "certificate"), "start");
  cert.covering_from =
      json_index(need_field(j, "covering_from", "certificate"), "covering_from");
  cert.covering_through = json_index(
      need_field(j, "covering_through", "certificate"), "covering_through");
  cert.monotone_through = json_index(
      need_field(j, "monotone_through", "certificate"), "monotone_through");
  const ojson& jb = need_field(j, "monotone_beyond_certified", "certificate");
  if (!jb.is_boolean())
    throw MalformedCertificate("monotone_beyond_certified: expected a boolean");
  cert.monotone_beyond_certified = jb.get<bool>();

  const ojson& ja = need_field(j, "assumptions", "certificate");
  if (!ja.is_array()) throw MalformedCertificate("assumptions: expected an array");
  for (const auto& v : ja) {
    if (!v.is_string())
      throw MalformedCertificate("assumptions: expected strings");
    cert.assumptions.push_back(v.get<std::string>());
  }

  const ojson& jt = need_field(j, "terms", "certificate");
  if (!jt.is_array()) throw MalformedCertificate("terms: expected an array");
  for (const auto& v : jt) cert.terms.push_back(json_int(v, "terms entry"));

  const ojson& jbr = need_field(j, "brackets", "certificate");
  if (!jbr.is_array()) throw MalformedCertificate("brackets: expected an array");
  for (const auto& v : jbr) {
    if (!v.is_object())
      throw MalformedCertificate("brackets: expected objects");
    reject_unknown(v, {"n", "term", "lower", "upper", "tail_terms"}, "bracket");
    BracketEntry e;
    e.n = json_index(need_field(v, "n", "bracket"), "bracket n");
    e.term = json_int(need_field(v, "term", "bracket"), "bracket term");
    e.lower = json_enclosure(need_field(v, "lower", "bracket"), "bracket lower");
    e.upper = json_enclosure(need_field(v, "upper", "bracket"), "bracket upper");
    e.tail_terms =
        json_index(need_field(v, "tail_terms", "bracket"), "bracket tail_terms");
    cert.brackets.push_back(std::move(e));
  }

  cert.final_width =
      json_rat(need_field(j, "final_width", "certificate"), "final_width");
  return cert;
}

namespace {

VerifyReport invalid(std::string reason) {
  return {VerifyVerdict::invalid, std::move(reason)};
}

}  // namespace

VerifyReport verify_certificate(const Certificate& cert) {
  // schema-level sanity first: these are malformed certificates, not
  // falsified claims
  if (cert.version != 1)
    throw MalformedCertificate("unsupported certificate version");
  if (cert.w.empty()) throw MalformedCertificate("empty weight vector");
  if (cert.depth == 0) throw MalformedCertificate("depth must be positive");
  if (cert.brackets.size() != cert.depth + 1)
    throw MalformedCertificate("bracket count must be depth + 1");
  if (cert.terms.size() != cert.start + cert.depth)
    throw MalformedCertificate("term count must be start + depth");

  try {
    WeightVector w(cert.w);
    if (cert.growth_base <= 1)
      return invalid("growth base C does not exceed 1");
    Schedule s(w, cert.growth_base);
    const std::size_t d = w.d();

    if (cert.c_tilde_eps != s.companion_eps())
      return invalid("companion eps differs from the library constant");
    Enclosure root = s.companion().as_enclosure();
    if (root.lo != cert.c_tilde.lo || root.hi != cert.c_tilde.hi)
      return invalid("companion root enclosure does not replay");

    Layout L = derive_layout(s, cert.depth);
    if (L.repair_end != cert.repair_end || L.covering_from != cert.covering_from ||
        L.start != cert.start || L.covering_through != cert.covering_through ||
        L.monotone_through != cert.monotone_through)
      return invalid("layout indices do not replay");
    if (s.monotone_beyond(L.monotone_through) != cert.monotone_beyond_certified)
      return invalid("beyond-horizon separation flag does not replay");
    if (cert.assumptions != canonical_assumptions(L.covering_through,
                                                  L.monotone_through,
                                                  cert.monotone_beyond_certified))
      return invalid("assumption list does not replay");

    for (std::size_t m = 1; m < cert.repair_end; ++m)
      if (cert.terms[m - 1] != Int(m))
        return invalid("repaired prefix differs at index " + std::to_string(m));
    for (std::size_t m = cert.repair_end; m <= cert.start; ++m)
      if (cert.terms[m - 1] != s.beta(m))
        return invalid("canonical prefix differs at index " + std::to_string(m));
    for (std::size_t m = cert.start + 1; m <= cert.terms.size(); ++m) {
      if (cert.terms[m - 1] < s.beta(m) || cert.terms[m - 1] > s.gamma(m))
        return invalid("term outside envelope at index " + std::to_string(m));
    }
    for (std::size_t m = 1; m < cert.terms.size(); ++m)
      if (!(cert.terms[m - 1] < cert.terms[m]))
        return invalid("terms not strictly increasing at index " +
                       std::to_string(m + 1));

    const BracketEntry& seed = cert.brackets.front();
    if (seed.n != cert.start || seed.term != 0)
      return invalid("seed entry does not describe the canonical prefix");
    std::vector<Int> run(cert.terms.begin(), cert.terms.begin() + cert.start);
    SeedDecision sd = seed_decide(s, run, cert.x);
    if (sd.kind != SeedDecision::Kind::inside)
      return invalid("target not strictly inside the seed bracket");
    if (sd.tail_terms != seed.tail_terms)
      return invalid("seed tail length does not replay");
    if (sd.lower.lo != seed.lower.lo || sd.lower.hi != seed.lower.hi ||
        sd.upper.lo != seed.upper.lo || sd.upper.hi != seed.upper.hi)
      return invalid("seed bracket does not replay");

    for (std::size_t k = 1; k <= cert.depth; ++k) {
      const BracketEntry& e = cert.brackets[k];
      if (e.n != cert.start + k)
        return invalid("bracket index broken at entry " + std::to_string(k));
      if (e.term != cert.terms[e.n - 1])
        return invalid("bracket term disagrees with the term list at entry " +
                       std::to_string(k));
      RungCache cache;
      CertifyResult res =
          certify_candidate(s, run, cert.x, e.term, s.beta(e.n), cache);
      if (res.verdict != CandVerdict::accept)
        return invalid("selection does not recertify at entry " +
                       std::to_string(k));
      if (res.tail_terms != e.tail_terms)
        return invalid("tail length does not replay at entry " +
                       std::to_string(k));
      if (res.lower.lo != e.lower.lo || res.lower.hi != e.lower.hi ||
          res.upper.lo != e.upper.lo || res.upper.hi != e.upper.hi)
        return invalid("bracket enclosures do not replay at entry " +
                       std::to_string(k));
      run.push_back(e.term);
    }

    // hulls must nest (up to one rounding grain per side) and keep x inside
    const Rat slack = pow_rat(Rat(1, 2), 250);
    for (std::size_t k = 0; k < cert.brackets.size(); ++k) {
      const BracketEntry& e = cert.brackets[k];
      if (!(e.lower.lo <= cert.x && cert.x <= e.upper.hi))
        return invalid("target escapes the hull at entry " + std::to_string(k));
      if (k > 0) {
        const BracketEntry& p = cert.brackets[k - 1];
        if (e.lower.lo < p.lower.lo - slack || e.upper.hi > p.upper.hi + slack)
          return invalid("hulls do not nest at entry " + std::to_string(k));
      }
    }

    const BracketEntry& last = cert.brackets.back();
    if (cert.final_width != last.upper.hi - last.lower.lo)
      return invalid("final width does not match the last hull");

    return {VerifyVerdict::valid, ""};
  } catch (const PrecisionCapExceeded& e) {
    return {VerifyVerdict::undecided, e.what()};
  } catch (const FloorUndecidable& e) {
    return {VerifyVerdict::undecided, e.what()};
  } catch (const std::invalid_argument& e) {
    throw MalformedCertificate(e.what());
  } catch (const Error& e) {
    return invalid(e.what());
  }
}

VerifyReport verify_certificate_text(const std::string& json_text) {
  return verify_certificate(certificate_from_json(json_text));
}

}  // namespace ahmes
