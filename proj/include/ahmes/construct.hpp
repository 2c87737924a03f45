#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ahmes/enclosure.hpp"
#include "ahmes/schedule.hpp"
#include "ahmes/sequence.hpp"

namespace ahmes {

enum class TailKind { beta_tail, gamma_tail };

// One recorded selection step. The enclosures are rounded outward onto the
// 2^-kBracketRecordBits grid, exactly as serialized, so a verifier that
// recomputes and re-rounds must reproduce them bit for bit.
struct BracketEntry {
  std::size_t n = 0;       // prefix length when the bracket was taken
  Int term;                // a_n chosen at this step (0 for the seed entry)
  Enclosure lower;         // encloses the all-gamma continuation sum
  Enclosure upper;         // encloses the all-beta continuation sum
  std::size_t tail_terms = 0;  // exact rail terms used before the remainder
};

inline constexpr unsigned long kBracketRecordBits = 256;

// Selection state, advanced one term at a time. terms holds a_1..a_N:
// a_n = n below repair_end, the canonical beta prefix through start, and
// certified selections beyond.
struct ConstructionState {
  std::shared_ptr<const Schedule> sched;
  std::vector<Int> terms;
  std::size_t repair_end = 1;
  std::size_t start = 0;
  std::size_t covering_from = 0;
  Rat x;
  std::vector<BracketEntry> ledger;
};

// Enclosure of the infinite hybrid sum: the recorded prefix, then the chosen
// envelope rail forever. tail_terms exact rail terms are summed before the
// certified geometric remainder; the caller picks it (>= d).
Enclosure bracket_at(const ConstructionState& st, TailKind kind,
                     std::size_t tail_terms);

// Same, with tail_terms grown until the width target is met.
Enclosure bracket(const ConstructionState& st, TailKind kind,
                  const Precision& prec);

// Endpoint enclosures (lo = all-gamma sum, hi = all-beta sum) of the
// attainable interval for the current prefix, rounded onto the record grid.
std::pair<Enclosure, Enclosure> attainable_interval(
    const ConstructionState& st, const Precision& prec);

// Chooses a_{N+1}: the smallest admissible candidate whose bracket
// certifiably contains x, appends it, and records the ledger entry.
// Budgets (tail ladder, Newton, walk) are fixed internally.
Int construct_next(ConstructionState& st);

struct Certificate {
  int version = 1;
  std::vector<unsigned long> w;
  Rat growth_base;  // C
  Rat x;
  std::size_t depth = 0;
  Enclosure c_tilde;
  Rat c_tilde_eps;
  std::size_t repair_end = 0;
  std::size_t start = 0;
  std::size_t covering_from = 0;
  std::size_t covering_through = 0;
  std::size_t monotone_through = 0;
  bool monotone_beyond_certified = false;
  std::vector<std::string> assumptions;
  std::vector<Int> terms;
  std::vector<BracketEntry> brackets;
  Rat final_width;
};

struct ConstructionResult {
  Sequence seq;
  Certificate cert;
  ConstructionState state;
};

// Full pipeline: schedule, repair block, covering scan, canonical prefix,
// certified selection to the requested depth. x must lie strictly inside
// the attainable interval of the canonical prefix.
ConstructionResult construct(const WeightVector& w, const Rat& C, const Rat& x,
                             std::size_t depth, const Precision& prec);

// Same, with x taken as the exact midpoint of the attainable interval.
ConstructionResult construct_midpoint(const WeightVector& w, const Rat& C,
                                      std::size_t depth, const Precision& prec);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

enum class VerifyVerdict { valid, invalid, undecided };

struct VerifyReport {
  VerifyVerdict verdict = VerifyVerdict::invalid;
  std::string reason;  // empty when valid
};

// Independent replay: rebuilds the schedule from the certificate's raw data
// and re-derives every recorded fact (root enclosure, repair index, covering
// scan, term membership, bracket enclosures, containment, nesting). Throws
// MalformedCertificate on parse/schema problems; computational dead ends
// (budget exhaustion) come back as undecided.
VerifyReport verify_certificate(const Certificate& cert);
VerifyReport verify_certificate_text(const std::string& json_text);

}  // namespace ahmes
