#include "ahmes/charpoly.hpp"

#include <stdexcept>

#include "ahmes/errors.hpp"

namespace ahmes {

WeightVector::WeightVector(std::vector<unsigned long> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("weight vector must be nonempty");
  if (w_.back() == 0)
    throw std::invalid_argument("leading weight w_{d-1} must be >= 1");
  total_ = 0;
  for (unsigned long wj : w_) {
    total_ += wj;
    if (wj > max_) max_ = wj;
  }
}

void IntPolynomial::normalize() {
  while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
}

Rat eval_at(const IntPolynomial& p, const Rat& x) {
  Rat acc(0);
  for (std::size_t i = p.coeffs.size(); i-- > 0;) acc = acc * x + p.coeffs[i];
  return acc;
}

IntPolynomial derivative(const IntPolynomial& p) {
  IntPolynomial d;
  if (p.coeffs.size() <= 1) {
    d.coeffs = {Int(0)};
    return d;
  }
  d.coeffs.resize(p.coeffs.size() - 1);
  for (std::size_t i = 1; i < p.coeffs.size(); ++i)
    d.coeffs[i - 1] = p.coeffs[i] * static_cast<long>(i);
  d.normalize();
  return d;
}

namespace {

// (x - 1) * sum_j w_j x^j expanded: coefficient of x^j is w_{j-1} - w_j.
IntPolynomial expand_shifted_weights(const WeightVector& w) {
  const std::size_t d = w.d();
  IntPolynomial p;
  p.coeffs.assign(d + 1, Int(0));
  for (std::size_t j = 0; j <= d; ++j) {
    Int c(0);
    if (j > 0) c += w.at(j - 1);
    if (j < d) c -= w.at(j);
    p.coeffs[j] = c;
  }
  return p;
}

}  // namespace

IntPolynomial char_poly(const WeightVector& w) {
  IntPolynomial p = expand_shifted_weights(w);
  p.coeffs[w.d() - 1] -= w.max_weight();
  p.normalize();
  return p;
}

IntPolynomial companion_poly(const WeightVector& w) {
  IntPolynomial p = expand_shifted_weights(w);
  p.coeffs[w.d() - 1] -= 1;
  p.normalize();
  return p;
}

namespace {

using RatPoly = std::vector<Rat>;

RatPoly to_rat_poly(const IntPolynomial& p) {
  RatPoly r(p.coeffs.size());
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) r[i] = Rat(p.coeffs[i]);
  while (r.size() > 1 && r.back() == 0) r.pop_back();
  return r;
}

Rat eval_rat_poly(const RatPoly& p, const Rat& x) {
  Rat acc(0);
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

bool is_zero_poly(const RatPoly& p) {
  return p.size() == 1 && p[0] == 0;
}

// Remainder of a / b over the rationals (degrees here are tiny, so the
// naive division is plenty).
RatPoly rat_poly_rem(RatPoly a, const RatPoly& b) {
  while (a.size() >= b.size() && !is_zero_poly(a)) {
    Rat f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    while (a.size() > 1 && a.back() == 0) a.pop_back();
    if (a.size() < b.size()) break;
    if (a.back() == 0) break;
  }
  while (a.size() > 1 && a.back() == 0) a.pop_back();
  return a;
}

std::vector<RatPoly> sturm_chain(const IntPolynomial& p) {
  std::vector<RatPoly> chain;
  chain.push_back(to_rat_poly(p));
  chain.push_back(to_rat_poly(derivative(p)));
  if (is_zero_poly(chain[1])) {
    chain.pop_back();
    return chain;
  }
  while (true) {
    RatPoly r = rat_poly_rem(chain[chain.size() - 2], chain.back());
    if (is_zero_poly(r)) break;
    for (auto& c : r) c = -c;
    chain.push_back(std::move(r));
    if (chain.back().size() == 1) break;
  }
  return chain;
}

int sign_variations(const std::vector<RatPoly>& chain, const Rat& x) {
  int variations = 0;
  int last = 0;
  for (const auto& f : chain) {
    Rat v = eval_rat_poly(f, x);
    int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++variations;
    last = s;
  }
  return variations;
}

// Cauchy-style bound, nudged up to the dyadic grid so bisection endpoints
// stay dyadic throughout.
Rat root_upper_bound(const IntPolynomial& p) {
  const Int& lead = p.coeffs.back();
  Rat mx(0);
  for (std::size_t i = 0; i + 1 < p.coeffs.size(); ++i) {
    Rat a = Rat(abs(p.coeffs[i])) / lead;
    if (a > mx) mx = a;
  }
  Rat u = 1 + round_up_dyadic(mx, 8);
  return u;
}

struct IsolationSetup {
  std::vector<RatPoly> chain;
  Rat upper;
};

IsolationSetup prepare(const IntPolynomial& p, RootKind kind) {
  if (p.coeffs.size() < 2 || p.coeffs.back() <= 0)
    throw std::invalid_argument("isolate_root: positive leading coeff required");
  if (eval_at(p, Rat(1)) >= 0)
    throw std::invalid_argument("isolate_root: value at 1 must be negative");

  IsolationSetup s;
  s.chain = sturm_chain(p);
  s.upper = root_upper_bound(p);
  while (eval_at(p, s.upper) == 0) s.upper += 1;

  int in_range = sign_variations(s.chain, Rat(1)) -
                 sign_variations(s.chain, s.upper);
  if (kind == RootKind::unique_positive && in_range != 1)
    throw IsolationFailed("expected exactly one root above 1, found " +
                          std::to_string(in_range));
  if (kind == RootKind::largest_positive && in_range < 1)
    throw IsolationFailed("no root above 1");
  return s;
}

}  // namespace

int count_roots(const IntPolynomial& p, const Rat& a, const Rat& b) {
  auto chain = sturm_chain(p);
  return sign_variations(chain, a) - sign_variations(chain, b);
}

namespace {

// Shared bisection driver. Both kinds start from [1, upper]; unique_positive
// walks the sign change, largest_positive walks the Sturm count on the right
// half so it homes in on the top root even with others below. Exits only
// once the bracket is narrower than eps, sits strictly above 1, and (for
// largest_positive) provably holds exactly one distinct root.
RootEnclosure bisect(const IntPolynomial& p, RootKind kind,
                     const IsolationSetup& setup, Rat lo, Rat hi,
                     const Rat& eps, int budget) {
  const int v_upper = sign_variations(setup.chain, setup.upper);
  auto roots_right_of = [&](const Rat& x) {
    return sign_variations(setup.chain, x) - v_upper;
  };
  auto done = [&]() {
    if (hi - lo > eps || lo <= 1) return false;
    if (kind == RootKind::largest_positive && roots_right_of(lo) != 1)
      return false;
    return true;
  };

  for (int it = 0; !done(); ++it) {
    if (it > budget)
      throw PrecisionCapExceeded("root bisection exceeded its budget");
    Rat mid = (lo + hi) / 2;
    Rat v = eval_at(p, mid);
    if (v == 0) {
      if (kind == RootKind::largest_positive && roots_right_of(mid) > 0) {
        lo = mid;  // exact hit below the top root; keep going right
        continue;
      }
      return RootEnclosure{mid, mid, p, kind};
    }
    bool go_right;
    if (kind == RootKind::unique_positive)
      go_right = v < 0;
    else
      go_right = roots_right_of(mid) > 0;
    if (go_right)
      lo = mid;
    else
      hi = mid;
  }

  if (!(eval_at(p, lo) <= 0 && eval_at(p, hi) >= 0))
    throw IsolationFailed("no sign change across the isolated bracket");
  return RootEnclosure{std::move(lo), std::move(hi), p, kind};
}

int bisection_budget(const Rat& eps, const Rat& range, int extra) {
  // enough halvings to get range below eps, plus slack for the lo > 1 and
  // single-root exit conditions
  long need = floor_log2(range / eps) + 16;
  if (need < 64) need = 64;
  return static_cast<int>(need) + (extra > 0 ? extra : 0);
}

}  // namespace

RootEnclosure isolate_root(const IntPolynomial& p, RootKind kind,
                           const Precision& prec) {
  IsolationSetup s = prepare(p, kind);
  const Rat eps = prec.target_width;
  return bisect(p, kind, s, Rat(1), s.upper, eps,
                bisection_budget(eps, s.upper - 1, prec.max_refinements));
}

RootEnclosure refine(const RootEnclosure& r, const Rat& eps) {
  if (r.lo == r.hi) return r;
  if (r.hi - r.lo <= eps && r.lo > 1) return r;
  // An isolated bracket carries a sign change around its single root, so
  // narrowing only needs plain evaluations, not another Sturm walk. Each
  // round bisects once (worst-case halving) and then tries a Newton step
  // from the fresh endpoint, snapped onto a dyadic grid sized to the
  // precision achieved so far so iterate magnitudes stay proportional.
  Rat lo = r.lo;
  Rat hi = r.hi;
  if (eval_at(r.poly, lo) == 0) return RootEnclosure{lo, lo, r.poly, r.kind};
  if (eval_at(r.poly, hi) == 0) return RootEnclosure{hi, hi, r.poly, r.kind};
  if (!(eval_at(r.poly, lo) < 0 && eval_at(r.poly, hi) > 0))
    throw IsolationFailed("refine: bracket lost its sign change");
  const IntPolynomial dp = derivative(r.poly);
  for (int round = 0; round < 512; ++round) {
    if (hi - lo <= eps && lo > 1) return RootEnclosure{lo, hi, r.poly, r.kind};

    Rat mid = (lo + hi) / 2;
    Rat vm = eval_at(r.poly, mid);
    if (vm == 0) return RootEnclosure{mid, mid, r.poly, r.kind};
    if (vm < 0)
      lo = mid;
    else
      hi = mid;

    // Newton estimate from the probe, then test the two dyadic grid points
    // around it. The grid is a little coarser than the estimate's accuracy,
    // so whenever Newton behaves the two probes straddle the root and the
    // bracket collapses to one cell, doubling the usable bits per round.
    // A single root with a sign change makes every probe decisive: value
    // above zero puts the root left of the probe, below puts it right.
    Rat dv = eval_at(dp, mid);
    if (dv == 0) continue;
    long have = floor_log2(Rat(1) / (hi - lo));
    if (have < 48) have = 48;
    unsigned long k = static_cast<unsigned long>(2 * have - 32);
    Rat t_lo = round_down_dyadic(mid - vm / dv, k);
    Rat t_hi = t_lo + pow_rat(Rat(1, 2), static_cast<long>(k));
    if (t_lo <= lo || t_hi >= hi) continue;
    Rat v_lo = eval_at(r.poly, t_lo);
    if (v_lo == 0) return RootEnclosure{t_lo, t_lo, r.poly, r.kind};
    Rat v_hi = eval_at(r.poly, t_hi);
    if (v_hi == 0) return RootEnclosure{t_hi, t_hi, r.poly, r.kind};
    if (v_lo < 0 && v_hi > 0) {
      lo = t_lo;
      hi = t_hi;
    } else if (v_hi < 0) {
      lo = t_hi;
    } else if (v_lo > 0) {
      hi = t_lo;
    }
  }
  throw PrecisionCapExceeded("root refinement exceeded its budget");
}

RootEnclosure allones_root(std::size_t d, const Precision& prec) {
  if (d == 0) throw std::invalid_argument("allones_root needs d >= 1");
  return isolate_root(companion_poly(WeightVector(
                          std::vector<unsigned long>(d, 1ul))),
                      RootKind::largest_positive, prec);
}

}  // namespace ahmes
