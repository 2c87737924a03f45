#include "ahmes/schedule.hpp"

#include <stdexcept>

#include "ahmes/errors.hpp"

namespace ahmes {

namespace {

// Exact [lo^n, hi^n] for 0 <= lo <= hi.
Enclosure enc_pow_ui(const Enclosure& e, unsigned long n) {
  if (e.lo < 0) throw std::invalid_argument("enc_pow_ui: negative base");
  Rat lo = pow_rat(e.lo, static_cast<long>(n));
  Rat hi = pow_rat(e.hi, static_cast<long>(n));
  return Enclosure(lo, hi);
}

}  // namespace

Schedule::Schedule(WeightVector w, Rat growth_base)
    : w_(std::move(w)), C_(std::move(growth_base)) {
  if (C_ <= 1) throw std::invalid_argument("Schedule: growth base must be > 1");
  // Declared isolation width for the companion root. Floors re-narrow on
  // demand from scratch, so this only fixes what companion() reports.
  root_eps_ = pow_rat(Rat(1, 2), 64);
  root_ = isolate_root(companion_poly(w_), RootKind::largest_positive,
                       Precision(root_eps_));
  sharp_ = root_;
}

// Enclosure of c~^n with width <= target. Starts from the sharpest root
// bracket seen so far; the enclosure it returns varies with call history,
// but the only consumers are floor computations whose integer results are
// canonical, so nothing certified depends on the cache state.
Enclosure Schedule::exponent_power(std::size_t n, const Rat& target) const {
  RootEnclosure r = [this] {
    std::lock_guard<std::mutex> lock(memo_mu_);
    return sharp_;
  }();
  for (int round = 0; round < 128; ++round) {
    Enclosure cn = enc_pow_ui(r.as_enclosure(), n);
    if (cn.width() <= target) {
      std::lock_guard<std::mutex> lock(memo_mu_);
      if (r.hi - r.lo < sharp_.hi - sharp_.lo) sharp_ = r;
      return cn;
    }
    // width(c^n) <= n * hi^(n-1) * width(c), so ask for the matching slack
    Rat slope = Rat(static_cast<unsigned long>(n)) *
                pow_rat(r.hi, static_cast<long>(n) - 1);
    r = refine(r, target / (slope * 4));
  }
  throw PrecisionCapExceeded("schedule exponent did not narrow");
}

Int Schedule::floor_env(std::size_t n, unsigned long extra) const {
  const Rat shift(static_cast<unsigned long>(n) * n + extra);
  RefinableEnclosure expo{[this, n, shift](const Rat& width) {
    Enclosure cn = exponent_power(n, width);
    return Enclosure(cn.lo + shift, cn.hi + shift);
  }};
  return floor_power(C_, expo, Precision());
}

Int Schedule::beta(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("Schedule::beta: index starts at 1");
  {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto it = beta_memo_.find(n);
    if (it != beta_memo_.end()) return it->second;
  }
  Int v = floor_env(n, 1);
  std::lock_guard<std::mutex> lock(memo_mu_);
  return beta_memo_.emplace(n, std::move(v)).first->second;
}

Int Schedule::gamma(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("Schedule::gamma: index starts at 1");
  {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto it = gamma_memo_.find(n);
    if (it != gamma_memo_.end()) return it->second;
  }
  Int v = floor_env(n, n);
  std::lock_guard<std::mutex> lock(memo_mu_);
  return gamma_memo_.emplace(n, std::move(v)).first->second;
}

Rat Schedule::envelope_step_ratio(std::size_t m0) const {
  if (m0 == 0) throw std::invalid_argument("envelope_step_ratio: m0 >= 1");
  // G(m0) = (c-1) c^m0 + m0 + 2, lower-bounded through the root enclosure.
  RootEnclosure r = refine(root_, root_eps_);
  Enclosure c = r.as_enclosure();
  Enclosure g = add(mul(sub(c, Enclosure::point(1)), enc_pow_ui(c, m0)),
                    Enclosure::point(Rat(static_cast<unsigned long>(m0) + 2)));
  Int gcap = floor_rat(g.lo);
  if (gcap < 1) throw NoCertificate("envelope_step_ratio: exponent gap < 1");
  if (gcap > 64) gcap = 64;  // C^64 already crushes the ratio; keep it small
  Rat bound = Rat(2) / pow_rat(C_, gcap.get_si());
  // beta floors only obey beta >= C^E / 2 once C^E >= 2. The exponent grows
  // with the index, so certifying C^E >= 2 at m0+1 covers the whole tail,
  // and a floor of the exponent enclosure is enough (no envelope value is
  // materialized; beta_{m0+1} itself can be astronomically large).
  Enclosure be = add(enc_pow_ui(c, m0 + 1),
                     Enclosure::point(Rat(static_cast<unsigned long>(m0 + 1) *
                                              static_cast<unsigned long>(m0 + 1) +
                                          1)));
  Int becap = floor_rat(be.lo);
  if (becap > 64) becap = 64;
  if (becap < 1 || pow_rat(C_, becap.get_si()) < 2)
    throw NoCertificate("envelope_step_ratio: envelope too small at m0+1");
  if (bound >= 1)
    throw NoCertificate("envelope_step_ratio: bound not below 1");
  return bound;
}

bool Schedule::monotone_beyond(std::size_t horizon) const {
  // gamma_m < beta_{m+1} for all m > horizon follows from
  // C^G(m) >= 2: the real envelopes then differ by a factor >= 2, which
  // survives both floors because gamma_m >= 1 (C > 1 and a positive
  // exponent). G grows in m, so checking the first index is enough.
  std::size_t m = horizon + 1;
  RootEnclosure r = refine(root_, root_eps_);
  Enclosure c = r.as_enclosure();
  Enclosure g = add(mul(sub(c, Enclosure::point(1)), enc_pow_ui(c, m)),
                    Enclosure::point(Rat(static_cast<unsigned long>(m) + 2)));
  Int gcap = floor_rat(g.lo);
  if (gcap < 1) return false;
  if (gcap > 64) gcap = 64;
  return pow_rat(C_, gcap.get_si()) >= 2;
}

std::pair<Int, Int> schedule_bounds(const Schedule& s, std::size_t n) {
  return {s.beta(n), s.gamma(n)};
}

CoverVerdict covering_check(const WeightVector& w,
                            const std::function<Int(std::size_t)>& beta,
                            const std::function<Int(std::size_t)>& gamma,
                            std::size_t N) {
  const std::size_t d = w.d();
  if (N < d) throw std::invalid_argument("covering_check: N >= d required");

  // L: every ratio uses the least admissible numerator index against the
  // greatest admissible denominator index.
  Rat L(beta(N + 1));
  for (std::size_t i = 0; i + 1 < d; ++i) {
    Rat ratio = Rat(beta(N - d + 2 + i)) / Rat(gamma(N - d + 3 + i));
    L *= pow_rat(ratio, static_cast<long>(w.at(i)));
  }
  {
    Rat last = Rat(beta(N + 1)) / Rat(beta(N + 2));
    L *= pow_rat(last, static_cast<long>(w.at(d - 1)));
  }

  // U = w_{d-1} / D_min; D_min <= 0 means the two bracketing endpoints can
  // cross, which is an unconditional fail.
  unsigned long wd2 = d >= 2 ? w.at(d - 2) : 0;
  Rat b1(beta(N + 1));
  Rat t1 = pow_rat(b1 / (b1 + 1), static_cast<long>(wd2));
  Rat t2 = pow_rat(Rat(beta(N + 2)) / Rat(gamma(N + 2)),
                   static_cast<long>(w.at(d - 1)));
  Rat d_min = t1 - t2;
  if (d_min <= 0) return CoverVerdict::fail;
  Rat U = Rat(w.at(d - 1)) / d_min;
  return L > U ? CoverVerdict::pass : CoverVerdict::fail;
}

CoverVerdict covering_check(const Schedule& s, std::size_t N) {
  return covering_check(
      s.weights(), [&s](std::size_t n) { return s.beta(n); },
      [&s](std::size_t n) { return s.gamma(n); }, N);
}

}  // namespace ahmes
