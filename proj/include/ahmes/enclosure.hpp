#pragma once

#include <functional>

#include "ahmes/rational.hpp"

namespace ahmes {

// Closed rational interval [lo, hi] guaranteed to contain the real value it
// stands for. Endpoints are exact rationals; all operations keep containment
// (outward rounding where rounding happens at all).
struct Enclosure {
  Rat lo;
  Rat hi;

  Enclosure() : lo(0), hi(0) {}
  Enclosure(Rat l, Rat h);
  static Enclosure point(const Rat& v) { return Enclosure(v, v); }

  Rat width() const { return hi - lo; }
  bool is_point() const { return lo == hi; }
  bool contains(const Rat& v) const { return lo <= v && v <= hi; }
  bool contains(const Enclosure& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
};

// Width target plus a refinement budget. Every iterative routine in the
// library is budgeted; running out raises PrecisionCapExceeded (or the
// operation-specific *Undecidable error) rather than looping forever.
struct Precision {
  Rat target_width;
  int max_refinements = 64;

  Precision() : target_width(Rat(1, 1000000)) {}
  explicit Precision(Rat w, int refinements = 64);
};

enum class Trilean { yes, no, undecided };

Enclosure add(const Enclosure& x, const Enclosure& y);
Enclosure sub(const Enclosure& x, const Enclosure& y);
Enclosure neg(const Enclosure& x);
Enclosure mul(const Enclosure& x, const Enclosure& y);
// Throws DivisionByIntervalContainingZero when 0 in y.
Enclosure div(const Enclosure& x, const Enclosure& y);

// Outward rounding onto the 2^-bits dyadic grid; result contains x.
Enclosure outward(const Enclosure& x, unsigned long bits);

// max/min of the two real values, as an enclosure.
Enclosure enc_max(const Enclosure& x, const Enclosure& y);

Trilean certainly_less(const Enclosure& x, const Enclosure& y);        // x < y
Trilean certainly_less_equal(const Enclosure& x, const Enclosure& y);  // x <= y

// Natural log of an exact rational q > 0, width <= max(width, tiny).
// The kernel is an argument-reduced atanh series evaluated in directed
// fixed-point arithmetic; no machine floating point anywhere.
Enclosure ln_point(const Rat& q, const Rat& width);

// ln over an interval with 0 < x.lo, by endpoint monotonicity.
Enclosure ln_enclosure(const Enclosure& x, const Precision& prec);

// exp of an exact rational, absolute target width.
Enclosure exp_point(const Rat& q, const Rat& width);

Enclosure exp_enclosure(const Enclosure& x, const Precision& prec);

// base^expo for rational base > 1. Exact when expo is a point integer;
// otherwise exp(expo * ln base) with the width budget split internally.
// rel_bits asks for relative width <= 2^-rel_bits (needed when the result is
// astronomically large and an absolute width target would be meaningless).
Enclosure pow_enclosure(const Rat& base, const Enclosure& expo,
                        unsigned long rel_bits);

// An exponent that can be re-narrowed on demand, e.g. c~^n + n^2 + 1 where
// c~ comes from root isolation and can be re-bisected. The callable must be
// deterministic and must return an enclosure of width <= the request
// (or as narrow as it can get; floor_power gives up after its budget).
struct RefinableEnclosure {
  std::function<Enclosure(const Rat& width)> at_width;
};

// floor(base^t) as an exact integer. When the exponent enclosure is a point
// rational p/q the floor is certified by exact integer cross-powering, which
// also detects base^t being exactly an integer. Otherwise refines until the
// power enclosure separates from integer boundaries; FloorUndecidable when
// the budget is exhausted first.
Int floor_power(const Rat& base, const RefinableEnclosure& expo,
                const Precision& prec);

}  // namespace ahmes
