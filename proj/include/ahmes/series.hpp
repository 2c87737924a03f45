#pragma once

#include <cstddef>
#include <vector>

#include "ahmes/charpoly.hpp"
#include "ahmes/enclosure.hpp"
#include "ahmes/sequence.hpp"

namespace ahmes {

// The weighted series S = sum_{n >= d} b_{n-d+1} / x_n over the sliding
// window products x_n = a_{n-d+1}^{w_0} a_{n-d+2}^{w_1} ... a_n^{w_{d-1}}.
struct SeriesInstance {
  WeightVector w;
  Sequence a;
  Sequence b;
};

SeriesInstance make_series(WeightVector w, Sequence a);  // b = 1, 1, 1, ...
SeriesInstance make_series(WeightVector w, Sequence a, Sequence b);

// x_n, exact. Requires n >= d.
Int term_xn(const SeriesInstance& inst, std::size_t n);

// b_{n-d+1} / x_n, exact.
Rat term_value(const SeriesInstance& inst, std::size_t n);

// sum_{n=d}^{N} of term_value, exact. Requires N >= d.
Rat partial_sum(const SeriesInstance& inst, std::size_t N);

// Certified B with sum_{n > N} term_value <= B, via the first omitted term
// and a geometric envelope: consecutive x-ratios factor into total() step
// ratios at indices >= N-d+2, each bounded by the sequence's certified step
// bound r, so B = t_{N+1} / (1 - r^total). Needs constant b and an infinite
// a with a certifiable step ratio; throws NoCertificate otherwise.
// Requires N >= d-1.
Rat tail_bound(const SeriesInstance& inst, std::size_t N);

// [partial, partial + tail] at the smallest N whose certified tail bound
// meets the width target. terms_out (optional) receives that N.
Enclosure eval_series(const SeriesInstance& inst, const Precision& prec,
                      std::size_t* terms_out = nullptr);

struct HypothesisReport {
  Rat eta;
  Rat tau;
  std::size_t horizon;
  std::vector<std::size_t> violations;  // sorted, deduplicated indices

  bool clean() const { return violations.empty(); }
};

// Checks b_n <= n^eta and a_n^{w_0} ... a_{n+d-1}^{w_{d-1}} >= n^{1+tau}
// for every n <= horizon. Rational exponents are cleared to exact integer
// comparisons by raising both sides to the exponent denominator.
// Requires 0 <= eta < tau.
HypothesisReport check_hypotheses(const SeriesInstance& inst, const Rat& eta,
                                  const Rat& tau, std::size_t horizon);

}  // namespace ahmes
