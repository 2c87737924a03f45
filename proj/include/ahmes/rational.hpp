#pragma once

#include <gmpxx.h>

#include <string>

namespace ahmes {

using Int = mpz_class;
using Rat = mpq_class;

// Parses "p", "p/q", or the precision sugar "1e-k" (meaning 10^-k).
// Throws std::invalid_argument on anything else or q == 0.
Rat parse_rational(const std::string& text);

// Canonical "p/q" rendering, denominator always present ("3" -> "3/1").
std::string rational_to_string(const Rat& q);

Int floor_rat(const Rat& q);
Int ceil_rat(const Rat& q);

// q^e for machine-word exponents; e may be negative (q != 0 then).
Rat pow_rat(const Rat& q, long e);
Int pow_int(const Int& b, unsigned long e);

// Largest multiple of 2^-bits that is <= q (resp. smallest >= q).
Rat round_down_dyadic(const Rat& q, unsigned long bits);
Rat round_up_dyadic(const Rat& q, unsigned long bits);

// floor(log2(q)) for q > 0, exact.
long floor_log2(const Rat& q);

// Truncated-toward-zero decimal rendering with exactly `digits` fractional
// digits. Display only; never authoritative.
std::string to_decimal_string(const Rat& q, unsigned digits);

}  // namespace ahmes
