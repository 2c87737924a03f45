#include "ahmes/enclosure.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "ahmes/errors.hpp"

namespace ahmes {

namespace {

// Guard against silently materializing numbers past ~8 MB; anything that
// legitimately needs more should fail loudly instead of thrashing.
constexpr unsigned long kMaxResultBits = 1ul << 26;

// ---- directed fixed-point kernel -----------------------------------------
//
// Series kernels run on integers scaled by 2^scale. Multiplications round
// toward the direction the caller asks for, so a "down" accumulation is a
// certified lower bound and an "up" accumulation a certified upper bound.

Int fx_mul_down(const Int& a, const Int& b, unsigned long scale) {
  Int p = a * b;
  Int r;
  mpz_fdiv_q_2exp(r.get_mpz_t(), p.get_mpz_t(), scale);
  return r;
}

Int fx_mul_up(const Int& a, const Int& b, unsigned long scale) {
  Int p = a * b;
  Int r;
  mpz_cdiv_q_2exp(r.get_mpz_t(), p.get_mpz_t(), scale);
  return r;
}

Int fx_div_down(const Int& a, unsigned long d) {
  Int r;
  mpz_fdiv_q_ui(r.get_mpz_t(), a.get_mpz_t(), d);
  return r;
}

Int fx_div_up(const Int& a, unsigned long d) {
  Int r;
  mpz_cdiv_q_ui(r.get_mpz_t(), a.get_mpz_t(), d);
  return r;
}

Int fx_from_rat_down(const Rat& q, unsigned long scale) {
  Int n = q.get_num() << scale;
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), n.get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

Int fx_from_rat_up(const Rat& q, unsigned long scale) {
  Int n = q.get_num() << scale;
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), n.get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

Rat fx_to_rat(const Int& v, unsigned long scale) {
  Rat r(v, Int(1) << scale);
  r.canonicalize();
  return r;
}

// Bits needed so that the dyadic grid 2^-bits is finer than `width`.
unsigned long width_bits(const Rat& width) {
  if (width <= 0) throw std::invalid_argument("non-positive width request");
  long fl = floor_log2(width);
  return fl >= 0 ? 1ul : static_cast<unsigned long>(-fl) + 1ul;
}

// Exact sum of t^(2j+1)/(2j+1) over j in [a, b) for rational t, counted
// with powers relative to the segment start and combined as a balanced
// tree (binary splitting): operand sizes stay proportional to segment
// length instead of every leaf repaying the full power.
struct AtanhSeg {
  Rat sum;   // sum_{j in [a,b)} t^(2(j-a)+1) / (2j+1)
  Rat span;  // t^(2(b-a))
};

AtanhSeg atanh_segment(const Rat& t, unsigned long a, unsigned long b) {
  if (b - a == 1) return {t / Rat(2 * a + 1), t * t};
  unsigned long mid = a + (b - a) / 2;
  AtanhSeg left = atanh_segment(t, a, mid);
  AtanhSeg right = atanh_segment(t, mid, b);
  return {left.sum + left.span * right.sum, left.span * right.span};
}

// atanh series: ln m = 2 * sum t^(2j+1)/(2j+1), t = (m-1)/(m+1) in [0, 1/3]
// for m in [1, 2]. Returns scaled-integer bounds at 2^scale.
std::pair<Int, Int> ln_core_raw(const Rat& m, unsigned long scale) {
  const Rat t = (m - 1) / (m + 1);
  if (t == 0) return {Int(0), Int(0)};
  const unsigned long terms = scale / 3 + 3;
  Rat s = 2 * atanh_segment(t, 0, terms).sum;
  // tail <= t^(2J+1) / ((2J+1)(1 - t^2)) <= (9/8) t^(2J+1)/(2J+1) at t <= 1/3
  Rat tail = pow_rat(t, static_cast<long>(2 * terms + 1)) * Rat(9, 4) /
             Rat(2 * terms + 1);
  return {fx_from_rat_down(s, scale), fx_from_rat_up(s + tail, scale)};
}

// Memoized front end. Power floors ask for the same mantissa at slowly
// creeping scales; growing the cached run geometrically and shifting down
// makes the whole request stream cost about one run at twice the deepest
// scale. A downshift of valid bounds stays valid, just a couple ulp wider.
std::pair<Int, Int> ln_core(const Rat& m, unsigned long scale) {
  static std::mutex mu;
  static std::map<Rat, std::pair<unsigned long, std::pair<Int, Int>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end() || it->second.first < scale) {
    unsigned long have = it == cache.end() ? 0 : it->second.first;
    unsigned long grow = std::max(scale, 2 * have);
    auto v = ln_core_raw(m, grow);
    it = cache.insert_or_assign(m, std::make_pair(grow, std::move(v))).first;
  }
  const unsigned long have = it->second.first;
  const auto& v = it->second.second;
  if (have == scale) return v;
  const unsigned long delta = have - scale;
  Int lo, hi;
  mpz_fdiv_q_2exp(lo.get_mpz_t(), v.first.get_mpz_t(), delta);
  mpz_cdiv_q_2exp(hi.get_mpz_t(), v.second.get_mpz_t(), delta);
  return {lo, hi};
}

std::pair<Int, Int> ln2_core(unsigned long scale) {
  return ln_core(Rat(2), scale);
}

// exp series on t in [0, 2^-rbits], rbits >= 4. Every extra reduction bit
// shortens the series by the same factor while costing the caller just one
// more squaring, so deep reductions win at large scales.
std::pair<Int, Int> exp_core(const Rat& t, unsigned long scale,
                             unsigned long rbits) {
  const Int t_dn = fx_from_rat_down(t, scale);
  const Int t_up = fx_from_rat_up(t, scale);
  const unsigned long terms = scale / rbits + 3;

  const Int one = Int(1) << scale;
  Int p_dn = one, p_up = one;
  Int s_dn = 0, s_up = 0;
  for (unsigned long j = 0; j < terms; ++j) {
    s_dn += p_dn;
    s_up += p_up;
    p_dn = fx_div_down(fx_mul_down(p_dn, t_dn, scale), j + 1);
    p_up = fx_div_up(fx_mul_up(p_up, t_up, scale), j + 1) + 1;
  }
  // tail <= next term * 16/15 for t <= 1/16
  Int rem = fx_div_up(p_up * 16, 15) + 1;
  return {s_dn, s_up + rem};
}

}  // namespace

Enclosure::Enclosure(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo > hi) throw std::invalid_argument("enclosure with lo > hi");
}

Precision::Precision(Rat w, int refinements)
    : target_width(std::move(w)), max_refinements(refinements) {
  if (target_width <= 0)
    throw std::invalid_argument("precision target must be positive");
  if (max_refinements < 0)
    throw std::invalid_argument("negative refinement budget");
}

Enclosure add(const Enclosure& x, const Enclosure& y) {
  return Enclosure(x.lo + y.lo, x.hi + y.hi);
}

Enclosure sub(const Enclosure& x, const Enclosure& y) {
  return Enclosure(x.lo - y.hi, x.hi - y.lo);
}

Enclosure neg(const Enclosure& x) { return Enclosure(-x.hi, -x.lo); }

Enclosure mul(const Enclosure& x, const Enclosure& y) {
  Rat a = x.lo * y.lo, b = x.lo * y.hi, c = x.hi * y.lo, d = x.hi * y.hi;
  return Enclosure(std::min(std::min(a, b), std::min(c, d)),
                   std::max(std::max(a, b), std::max(c, d)));
}

Enclosure div(const Enclosure& x, const Enclosure& y) {
  if (y.lo <= 0 && y.hi >= 0)
    throw DivisionByIntervalContainingZero("division by interval containing 0");
  return mul(x, Enclosure(1 / y.hi, 1 / y.lo));
}

Enclosure outward(const Enclosure& x, unsigned long bits) {
  return Enclosure(round_down_dyadic(x.lo, bits), round_up_dyadic(x.hi, bits));
}

Enclosure enc_max(const Enclosure& x, const Enclosure& y) {
  return Enclosure(std::max(x.lo, y.lo), std::max(x.hi, y.hi));
}

Trilean certainly_less(const Enclosure& x, const Enclosure& y) {
  if (x.hi < y.lo) return Trilean::yes;
  if (x.lo >= y.hi) return Trilean::no;
  return Trilean::undecided;
}

Trilean certainly_less_equal(const Enclosure& x, const Enclosure& y) {
  if (x.hi <= y.lo) return Trilean::yes;
  if (x.lo > y.hi) return Trilean::no;
  return Trilean::undecided;
}

Enclosure ln_point(const Rat& q, const Rat& width) {
  if (q <= 0) throw NonPositiveArgument("ln of non-positive rational");
  if (q == 1) return Enclosure::point(Rat(0));
  if (q < 1) return neg(ln_point(1 / q, width));

  const long k = floor_log2(q);  // q = 2^k * m, m in [1, 2)
  Rat m = q / Rat(Int(1) << k);

  // budget: k copies of the ln2 bound plus the mantissa series; the kernels
  // waste at most ~2^(5-scale) each, so pad over the strict requirement.
  unsigned long scale = width_bits(width) + 32;
  {
    unsigned long kk = 1;
    for (long v = k; v > 0; v >>= 1) ++kk;
    scale += kk;
  }
  auto mcore = ln_core(m, scale);
  Rat lo = fx_to_rat(mcore.first, scale);
  Rat hi = fx_to_rat(mcore.second, scale);
  if (k != 0) {
    auto l2 = ln2_core(scale);
    lo += k * fx_to_rat(l2.first, scale);
    hi += k * fx_to_rat(l2.second, scale);
  }
  return Enclosure(lo, hi);
}

Enclosure ln_enclosure(const Enclosure& x, const Precision& prec) {
  if (x.lo <= 0) throw NonPositiveArgument("ln of interval touching 0");
  Rat w = prec.target_width / 4;
  return Enclosure(ln_point(x.lo, w).lo, ln_point(x.hi, w).hi);
}

Enclosure exp_point(const Rat& q, const Rat& width) {
  if (q == 0) return Enclosure::point(Rat(1));
  if (q < 0) {
    Enclosure e = exp_point(-q, width);
    return Enclosure(1 / e.hi, 1 / e.lo);
  }
  if (q > Rat(1l << 22)) throw PrecisionCapExceeded("exp argument too large");

  // result magnitude e^q needs ~1.45 q bits before the fractional ones
  unsigned long mag_bits =
      static_cast<unsigned long>(mpz_get_ui(ceil_rat(q * Rat(3, 2)).get_mpz_t())) + 2;
  // reduction depth balancing series length (scale/r terms) against the
  // squaring ladder (r multiplications): r ~ sqrt(2 * scale)
  unsigned long base_scale = width_bits(width) + mag_bits + 32;
  unsigned long r = 5;
  while (r < 4096 && r * r < 2 * base_scale) ++r;
  unsigned long k = 0;
  {
    long fl = floor_log2(q);
    if (fl + static_cast<long>(r) >= 0)
      k = static_cast<unsigned long>(fl + static_cast<long>(r));
  }
  unsigned long scale = base_scale + 2 * k;

  auto core = exp_core(q / Rat(Int(1) << k), scale, r);
  Int lo = core.first, hi = core.second;
  for (unsigned long i = 0; i < k; ++i) {
    lo = fx_mul_down(lo, lo, scale);
    hi = fx_mul_up(hi, hi, scale) + 1;
  }
  return Enclosure(fx_to_rat(lo, scale), fx_to_rat(hi, scale));
}

Enclosure exp_enclosure(const Enclosure& x, const Precision& prec) {
  Rat w = prec.target_width / 4;
  return Enclosure(exp_point(x.lo, w).lo, exp_point(x.hi, w).hi);
}

namespace {

// base^e for integer e with a size guard; base > 1 canonical.
Rat exact_int_power(const Rat& base, const Int& e) {
  Int ae = abs(e);
  Int mag = ae * (floor_log2(base) + 1);
  if (mag > kMaxResultBits)
    throw PrecisionCapExceeded("exact power would exceed the size guard");
  unsigned long ue = ae.get_ui();
  Rat num = Rat(pow_int(base.get_num(), ue), pow_int(base.get_den(), ue));
  num.canonicalize();
  return e >= 0 ? num : 1 / num;
}

}  // namespace

Enclosure pow_enclosure(const Rat& base, const Enclosure& expo,
                        unsigned long rel_bits) {
  if (base <= 1) throw std::invalid_argument("pow_enclosure needs base > 1");

  if (expo.is_point() && expo.lo.get_den() == 1) {
    Rat v = exact_int_power(base, expo.lo.get_num());
    return Enclosure::point(v);
  }

  const Int m = floor_rat(expo.lo);
  const Rat exact = exact_int_power(base, m);
  const Enclosure frac = sub(expo, Enclosure::point(Rat(m)));  // [0, ...)

  // exp(frac * ln base), endpoints only: both monotone since base > 1.
  const Rat kernel_width = pow_rat(Rat(1, 2), static_cast<long>(rel_bits) + 6);
  const Enclosure lnb = ln_point(base, kernel_width);
  const Enclosure arg = mul(frac, lnb);
  const Enclosure unit(exp_point(arg.lo, kernel_width).lo,
                       exp_point(arg.hi, kernel_width).hi);
  return mul(Enclosure::point(exact), unit);
}

Int floor_power(const Rat& base, const RefinableEnclosure& expo,
                const Precision& prec) {
  if (base <= 1) throw std::invalid_argument("floor_power needs base > 1");

  Enclosure e = expo.at_width(std::min(prec.target_width, Rat(1, 4)));

  if (e.is_point()) {
    // Exact rational exponent p/q: certify m <= base^(p/q) < m+1 by integer
    // cross-powering; this also proves exact integer hits.
    const Int p = e.lo.get_num();
    const Int q = e.lo.get_den();
    if (q == 1) return floor_rat(exact_int_power(base, p));

    const Rat bp = exact_int_power(base, p);
    if (mpz_fits_ulong_p(q.get_mpz_t()) == 0)
      throw PrecisionCapExceeded("exponent denominator out of range");
    const unsigned long uq = mpz_get_ui(q.get_mpz_t());

    Enclosure guess = pow_enclosure(base, e, 64);
    Int m = floor_rat(guess.lo);
    if (m < 0) m = 0;  // base > 1 so base^t > 0; floors below 0 impossible
    auto le_value = [&](const Int& c) {  // c^q <= base^p ?
      return Rat(pow_int(c, uq)) <= bp;
    };
    while (!le_value(m)) --m;
    while (le_value(m + 1)) ++m;
    return m;
  }

  // Irrational exponent: narrow until the power enclosure avoids integer
  // boundaries. The width request shrinks geometrically per round.
  Rat lb_hint = Rat(floor_log2(base) + 1);
  for (int round = 0; round <= prec.max_refinements; ++round) {
    Int mag = ceil_rat(e.hi * lb_hint);
    if (mag < 1) mag = 1;
    if (mag > kMaxResultBits)
      throw PrecisionCapExceeded("floor_power magnitude guard");
    unsigned long mag_bits = mpz_get_ui(mag.get_mpz_t());

    Rat want = pow_rat(Rat(1, 2), static_cast<long>(mag_bits) + 8 + 16 * round);
    Enclosure narrowed = expo.at_width(want);
    // at_width may legitimately return something wider than asked; detect
    // stalls so a non-narrowing handle fails as FloorUndecidable, not a hang.
    Enclosure p = pow_enclosure(base, narrowed, mag_bits + 16ul * (round + 1));
    Int ml = floor_rat(p.lo), mh = floor_rat(p.hi);
    if (ml == mh) return ml;
    if (round > 0 && narrowed.width() >= e.width())
      throw FloorUndecidable("exponent enclosure refused to narrow");
    e = narrowed;
  }
  throw FloorUndecidable("power straddles an integer at the precision cap");
}

}  // namespace ahmes
