#pragma once

#include <cstddef>
#include <vector>

#include "ahmes/charpoly.hpp"
#include "ahmes/enclosure.hpp"
#include "ahmes/series.hpp"

namespace ahmes {

// Normalized log-growth mu_n = ln(a_n) / c^n against a base c > 1, usually
// a root enclosure. Index convention: result[i] encloses mu_{i+1}.
Enclosure mu_value(const SeriesInstance& inst, const RootEnclosure& c,
                   std::size_t n, const Rat& target_width);
std::vector<Enclosure> mu_sequence(const SeriesInstance& inst,
                                   const RootEnclosure& c, std::size_t horizon,
                                   const Precision& prec);

struct PeakSet {
  std::size_t horizon = 0;
  std::vector<std::size_t> members;    // certified peaks
  std::vector<std::size_t> undecided;  // too wide to classify either way
};

// Peak predicate at m: mu_{m+1} > (1 + 1/m^2) * max_{k <= m} mu_k.
// Classification over enclosures is three-valued; members hold only the
// certified-true indices. mu[i] is read as mu_{i+1}.
PeakSet peaks(const std::vector<Enclosure>& mu);

// Convenience wrapper: builds the mu sequence itself and retries once at a
// sharply smaller width when any index stays undecided.
PeakSet peaks(const SeriesInstance& inst, const RootEnclosure& c,
              std::size_t horizon, const Precision& prec);

enum class LocalPeakVerdict { holds, fails, hypothesis_not_met, undecided };

// Two-stage check on a window [P, Q]:
//   1. certify the peak hypothesis mu_{Q+1} > (1 + 1/Q^2) max_{P<=k<=Q} mu_k
//      from the supplied enclosures (three-valued);
//   2. if it certifies, decide the window inequality
//      (a_P a_{P+1} ... a_Q)^W / x_{Q+1} <= a_{Q+1}^(-1/(Q^2+1))
//      EXACTLY, by raising both sides to Q^2+1 and comparing integers.
LocalPeakVerdict local_peak_check(const SeriesInstance& inst, std::size_t P,
                                  std::size_t Q,
                                  const std::vector<Enclosure>& mu);
LocalPeakVerdict local_peak_check(const SeriesInstance& inst, std::size_t P,
                                  std::size_t Q, const RootEnclosure& c,
                                  const Precision& prec);

struct MahlerGapReport {
  std::size_t N = 0;
  Int clearing_factor;     // D_N = (a_1 a_2 ... a_N)^W, W = max weight
  bool partial_integral;   // D_N * partial_sum(N) is an integer
  Enclosure gap;           // D_N * (certified tail enclosure)
  Int reduced_denominator; // q_N = denominator of partial_sum(N) in lowest
                           // terms (the minimal clearing multiplier)
  Enclosure reduced_gap;   // q_N * (same tail enclosure)
};

// Distance-to-integrality probe: multiplies the series tail by the cleared
// prefix denominator. Rationality of the limit would force these gaps to
// stay away from (0, 1/q); the report just measures them, with both the
// worst-case clearing factor D_N and the exact minimal one q_N.
MahlerGapReport mahler_gap(const SeriesInstance& inst, std::size_t N,
                           const Precision& prec);

// Enclosure of a_n^(1 / base^n), i.e. exp(ln a_n / base^n).
Enclosure growth_exponent(const SeriesInstance& inst, const Enclosure& base,
                          std::size_t n, const Precision& prec);
Enclosure growth_exponent(const SeriesInstance& inst, const RootEnclosure& base,
                          std::size_t n, const Precision& prec);

}  // namespace ahmes
