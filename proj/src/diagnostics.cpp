#include "ahmes/diagnostics.hpp"

#include <stdexcept>
#include <string>

#include "ahmes/errors.hpp"

namespace ahmes {

namespace {

constexpr unsigned long kMaxClearBits = 1ul << 26;

Int cleared_pow(const Int& b, unsigned long e, const char* what) {
  unsigned long bits = mpz_sizeinbase(b.get_mpz_t(), 2);
  if (e != 0 && bits > kMaxClearBits / e)
    throw PrecisionCapExceeded(std::string(what) +
                               ": cleared power exceeds the size cap");
  return pow_int(b, e);
}

// W = max_j w_j, the exponent in the clearing products D_N and in the
// local window inequality.
unsigned long clearing_weight(const SeriesInstance& inst) {
  return inst.w.max_weight();
}

Trilean strictly_above(const Enclosure& x, const Enclosure& y) {
  if (x.lo > y.hi) return Trilean::yes;
  if (x.hi <= y.lo) return Trilean::no;
  return Trilean::undecided;
}

}  // namespace

Enclosure mu_value(const SeriesInstance& inst, const RootEnclosure& c,
                   std::size_t n, const Rat& target) {
  if (n == 0) throw std::invalid_argument("mu_value: index starts at 1");
  if (target <= 0) throw std::invalid_argument("mu_value: width target");
  const Rat a_n(inst.a.at(n));

  RootEnclosure r = c;
  Rat ln_width = target / 4;
  for (int round = 0; round < 96; ++round) {
    Enclosure denom(pow_rat(r.lo, static_cast<long>(n)),
                    pow_rat(r.hi, static_cast<long>(n)));
    // scaling the ln request by denom.lo keeps the quotient width near the
    // requested one even when c^n is enormous
    Enclosure lna = ln_point(a_n, ln_width * denom.lo);
    Enclosure q = div(lna, denom);
    if (q.width() <= target) return q;
    ln_width /= 1024;
    Enclosure re = r.as_enclosure();
    if (!re.is_point()) r = refine(r, re.width() / 1024);
  }
  throw PrecisionCapExceeded("mu_value did not reach the width target");
}

std::vector<Enclosure> mu_sequence(const SeriesInstance& inst,
                                   const RootEnclosure& c, std::size_t horizon,
                                   const Precision& prec) {
  if (horizon == 0) throw std::invalid_argument("mu_sequence: empty horizon");
  std::vector<Enclosure> mu;
  mu.reserve(horizon);
  for (std::size_t n = 1; n <= horizon; ++n)
    mu.push_back(mu_value(inst, c, n, prec.target_width));
  return mu;
}

PeakSet peaks(const std::vector<Enclosure>& mu) {
  PeakSet out;
  out.horizon = mu.size();
  if (mu.size() < 2) return out;
  Enclosure runmax = mu[0];
  for (std::size_t m = 1; m + 1 <= mu.size(); ++m) {
    Rat delta = Rat(1) + Rat(1, static_cast<unsigned long>(m) * m);
    Enclosure threshold = mul(Enclosure::point(delta), runmax);
    switch (strictly_above(mu[m], threshold)) {
      case Trilean::yes:
        out.members.push_back(m);
        break;
      case Trilean::no:
        break;
      case Trilean::undecided:
        out.undecided.push_back(m);
        break;
    }
    runmax = enc_max(runmax, mu[m]);
  }
  return out;
}

PeakSet peaks(const SeriesInstance& inst, const RootEnclosure& c,
              std::size_t horizon, const Precision& prec) {
  PeakSet first = peaks(mu_sequence(inst, c, horizon, prec));
  if (first.undecided.empty()) return first;
  // one retry at a much smaller width; whatever stays undecided is reported
  Precision tighter(prec.target_width / Rat(Int(1) << 20),
                    prec.max_refinements);
  return peaks(mu_sequence(inst, c, horizon, tighter));
}

LocalPeakVerdict local_peak_check(const SeriesInstance& inst, std::size_t P,
                                  std::size_t Q,
                                  const std::vector<Enclosure>& mu) {
  if (P < 1 || Q < P) throw std::invalid_argument("local_peak_check: P <= Q");
  if (Q + 1 < inst.w.d())
    throw std::invalid_argument("local_peak_check: window below degree");
  if (mu.size() < Q + 1)
    throw std::invalid_argument("local_peak_check: mu sequence too short");

  Enclosure winmax = mu[P - 1];
  for (std::size_t k = P; k <= Q; ++k) winmax = enc_max(winmax, mu[k - 1]);
  Rat delta = Rat(1) + Rat(1, static_cast<unsigned long>(Q) * Q);
  Enclosure threshold = mul(Enclosure::point(delta), winmax);
  switch (strictly_above(mu[Q], threshold)) {
    case Trilean::no:
      return LocalPeakVerdict::hypothesis_not_met;
    case Trilean::undecided:
      return LocalPeakVerdict::undecided;
    case Trilean::yes:
      break;
  }

  // conclusion cleared of the fractional power: compare
  // (a_P ... a_Q)^(W (Q^2+1)) * a_{Q+1}  vs  x_{Q+1}^(Q^2+1)
  const unsigned long q21 = static_cast<unsigned long>(Q) * Q + 1;
  const unsigned long W = clearing_weight(inst);
  Int prod(1);
  for (std::size_t k = P; k <= Q; ++k) prod *= inst.a.at(k);
  Int lhs = cleared_pow(prod, W * q21, "local_peak") * inst.a.at(Q + 1);
  Int rhs = cleared_pow(term_xn(inst, Q + 1), q21, "local_peak");
  return lhs <= rhs ? LocalPeakVerdict::holds : LocalPeakVerdict::fails;
}

LocalPeakVerdict local_peak_check(const SeriesInstance& inst, std::size_t P,
                                  std::size_t Q, const RootEnclosure& c,
                                  const Precision& prec) {
  LocalPeakVerdict v =
      local_peak_check(inst, P, Q, mu_sequence(inst, c, Q + 1, prec));
  if (v != LocalPeakVerdict::undecided) return v;
  Precision tighter(prec.target_width / Rat(Int(1) << 20),
                    prec.max_refinements);
  return local_peak_check(inst, P, Q, mu_sequence(inst, c, Q + 1, tighter));
}

MahlerGapReport mahler_gap(const SeriesInstance& inst, std::size_t N,
                           const Precision& prec) {
  const std::size_t d = inst.w.d();
  if (N < d) throw std::invalid_argument("mahler_gap: N >= d required");
  const unsigned long W = clearing_weight(inst);

  Int D(1);
  for (std::size_t k = 1; k <= N; ++k)
    D *= cleared_pow(inst.a.at(k), W, "mahler_gap");
  const Rat partial = partial_sum(inst, N);
  const Rat scaled = Rat(D) * partial;
  MahlerGapReport report;
  report.N = N;
  report.clearing_factor = D;
  report.partial_integral = scaled.get_den() == 1;
  report.reduced_denominator = partial.get_den();

  // exact terms out to N+H plus a certified bound on the rest; H doubles
  // until the scaled window is narrow enough (q_N divides D_N, so the
  // reduced gap is automatically at least as narrow)
  std::size_t H = 1;
  for (int round = 0; round <= prec.max_refinements; ++round) {
    Rat exact(0);
    for (std::size_t n = N + 1; n <= N + H; ++n)
      exact += term_value(inst, n);
    Rat rest = tail_bound(inst, N + H);
    Enclosure gap(Rat(D) * exact, Rat(D) * (exact + rest));
    if (gap.width() <= prec.target_width) {
      report.gap = gap;
      report.reduced_gap = Enclosure(Rat(report.reduced_denominator) * exact,
                                     Rat(report.reduced_denominator) *
                                         (exact + rest));
      return report;
    }
    H *= 2;
  }
  throw PrecisionCapExceeded("mahler_gap: tail did not narrow");
}

Enclosure growth_exponent(const SeriesInstance& inst, const Enclosure& base,
                          std::size_t n, const Precision& prec) {
  if (n == 0) throw std::invalid_argument("growth_exponent: index starts at 1");
  if (base.lo <= 1)
    throw std::invalid_argument("growth_exponent: base must exceed 1");
  const Rat a_n(inst.a.at(n));

  Rat ln_width = prec.target_width / 8;
  Rat exp_width = prec.target_width / 8;
  for (int round = 0; round < 96; ++round) {
    Enclosure denom(pow_rat(base.lo, static_cast<long>(n)),
                    pow_rat(base.hi, static_cast<long>(n)));
    Enclosure lna = ln_point(a_n, ln_width * denom.lo);
    Enclosure q = div(lna, denom);
    Enclosure res = exp_enclosure(q, Precision(exp_width));
    if (res.width() <= prec.target_width) return res;
    if (denom.width() > 0 && ln_width < prec.target_width / (1 << 20))
      break;  // the base interval itself is the blocker; shrinking further
              // internal widths cannot help
    ln_width /= 1024;
    exp_width /= 1024;
  }
  throw PrecisionCapExceeded("growth_exponent did not reach the width target");
}

Enclosure growth_exponent(const SeriesInstance& inst, const RootEnclosure& base,
                          std::size_t n, const Precision& prec) {
  RootEnclosure r = base;
  for (int round = 0; round < 96; ++round) {
    try {
      return growth_exponent(inst, r.as_enclosure(), n, prec);
    } catch (const PrecisionCapExceeded&) {
      Enclosure re = r.as_enclosure();
      if (re.is_point()) throw;
      r = refine(r, re.width() / 1024);
    }
  }
  throw PrecisionCapExceeded("growth_exponent did not reach the width target");
}

}  // namespace ahmes
