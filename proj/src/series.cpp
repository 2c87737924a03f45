#include "ahmes/series.hpp"

#include <stdexcept>

#include "ahmes/errors.hpp"

namespace ahmes {

namespace {

constexpr unsigned long kMaxClearBits = 1ul << 26;

// b^e with a bit-size guard; hypothesis clearing can be asked to raise
// already-large terms to the exponent denominator.
Int guarded_pow(const Int& b, unsigned long e, const char* what) {
  unsigned long bits = mpz_sizeinbase(b.get_mpz_t(), 2);
  if (e != 0 && bits > kMaxClearBits / e)
    throw PrecisionCapExceeded(std::string(what) +
                               ": cleared power exceeds the size cap");
  return pow_int(b, e);
}

unsigned long as_ulong(const Int& v, const char* what) {
  if (v < 0 || !v.fits_ulong_p())
    throw std::invalid_argument(std::string(what) +
                                ": value does not fit an unsigned long");
  return v.get_ui();
}

}  // namespace

SeriesInstance make_series(WeightVector w, Sequence a) {
  return SeriesInstance{std::move(w), std::move(a), Sequence::constant(1)};
}

SeriesInstance make_series(WeightVector w, Sequence a, Sequence b) {
  return SeriesInstance{std::move(w), std::move(a), std::move(b)};
}

Int term_xn(const SeriesInstance& inst, std::size_t n) {
  const std::size_t d = inst.w.d();
  if (n < d) throw std::invalid_argument("term_xn: n >= d required");
  Int x(1);
  for (std::size_t j = 0; j < d; ++j)
    x *= guarded_pow(inst.a.at(n - d + 1 + j), inst.w.at(j), "term_xn");
  return x;
}

Rat term_value(const SeriesInstance& inst, std::size_t n) {
  const std::size_t d = inst.w.d();
  if (n < d) throw std::invalid_argument("term_value: n >= d required");
  Rat t(inst.b.at(n - d + 1));
  t /= Rat(term_xn(inst, n));
  return t;
}

Rat partial_sum(const SeriesInstance& inst, std::size_t N) {
  const std::size_t d = inst.w.d();
  if (N < d) throw std::invalid_argument("partial_sum: N >= d required");
  Rat sum(0);
  for (std::size_t n = d; n <= N; ++n) sum += term_value(inst, n);
  return sum;
}

Rat tail_bound(const SeriesInstance& inst, std::size_t N) {
  const std::size_t d = inst.w.d();
  if (N + 1 < d) throw std::invalid_argument("tail_bound: N >= d-1 required");
  if (inst.b.kind() != SeqKind::constant)
    throw NoCertificate("tail certificates need a constant numerator");
  if (!inst.a.has_tail())
    throw NoCertificate("tail certificates need an infinite sequence");

  // x_n / x_{n+1} = prod_j (a_{n-d+1+j} / a_{n-d+2+j})^{w_j}; every step
  // index involved is >= N-d+2 once n > N.
  Rat r = inst.a.step_ratio_bound(N - d + 2);
  Rat rho = pow_rat(r, static_cast<long>(as_ulong(inst.w.total(), "weight")));
  if (rho >= 1) throw NoCertificate("tail ratio bound did not stay below 1");
  return term_value(inst, N + 1) / (Rat(1) - rho);
}

Enclosure eval_series(const SeriesInstance& inst, const Precision& prec,
                      std::size_t* terms_out) {
  const std::size_t d = inst.w.d();
  if (prec.target_width <= 0)
    throw std::invalid_argument("eval_series: width target must be positive");
  Rat partial(0);
  // scan cap, distinct from the refinement budget: slowly converging
  // instances hit NoCertificate or the materialization guard first anyway
  const std::size_t max_terms = 20000;
  for (std::size_t N = d; N < d + max_terms; ++N) {
    partial += term_value(inst, N);
    Rat bound = tail_bound(inst, N);
    if (bound <= prec.target_width) {
      if (terms_out) *terms_out = N;
      return Enclosure(partial, partial + bound);
    }
  }
  throw PrecisionCapExceeded("eval_series: tail bound did not reach target");
}

HypothesisReport check_hypotheses(const SeriesInstance& inst, const Rat& eta,
                                  const Rat& tau, std::size_t horizon) {
  if (eta < 0) throw std::invalid_argument("check_hypotheses: eta >= 0");
  if (tau <= eta) throw std::invalid_argument("check_hypotheses: tau > eta");
  if (horizon < 1) throw std::invalid_argument("check_hypotheses: horizon");

  const std::size_t d = inst.w.d();
  const unsigned long pe = as_ulong(Int(eta.get_num()), "eta numerator");
  const unsigned long qe = as_ulong(Int(eta.get_den()), "eta denominator");
  const unsigned long pt = as_ulong(Int(tau.get_num()), "tau numerator");
  const unsigned long qt = as_ulong(Int(tau.get_den()), "tau denominator");

  HypothesisReport report{eta, tau, horizon, {}};
  for (std::size_t n = 1; n <= horizon; ++n) {
    const Int nn(static_cast<unsigned long>(n));
    bool bad = false;

    // b_n <= n^eta, cleared: b_n^qe <= n^pe
    if (guarded_pow(inst.b.at(n), qe, "hypothesis") >
        guarded_pow(nn, pe, "hypothesis"))
      bad = true;

    // a_n^{w_0} ... a_{n+d-1}^{w_{d-1}} >= n^{1+tau}, cleared with qt
    if (!bad) {
      Int lhs(1);
      for (std::size_t j = 0; j < d; ++j)
        lhs *= guarded_pow(inst.a.at(n + j), inst.w.at(j), "hypothesis");
      if (guarded_pow(lhs, qt, "hypothesis") <
          guarded_pow(nn, qt + pt, "hypothesis"))
        bad = true;
    }

    if (bad) report.violations.push_back(n);
  }
  return report;
}

}  // namespace ahmes
