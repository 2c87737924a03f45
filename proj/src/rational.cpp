#include "ahmes/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace ahmes {

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");

  // precision sugar: 1e-12 == 10^-12
  auto epos = text.find_first_of("eE");
  if (epos != std::string::npos) {
    const std::string mant = text.substr(0, epos);
    const std::string expo = text.substr(epos + 1);
    if (!is_integer_token(mant) || !is_integer_token(expo))
      throw std::invalid_argument("bad scientific rational literal: " + text);
    long e = std::strtol(expo.c_str(), nullptr, 10);
    Rat m(mant);
    Rat scale = pow_rat(Rat(10), e);
    return m * scale;
  }

  auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_integer_token(text))
      throw std::invalid_argument("bad rational literal: " + text);
    return Rat(Int(text));
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  if (!is_integer_token(num) || !is_integer_token(den))
    throw std::invalid_argument("bad rational literal: " + text);
  Int d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + text);
  Rat q(Int(num), d);
  q.canonicalize();
  return q;
}

std::string rational_to_string(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Int floor_rat(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

Int ceil_rat(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

Rat pow_rat(const Rat& q, long e) {
  if (e == 0) return Rat(1);
  if (e < 0) {
    if (q == 0) throw std::invalid_argument("pow_rat: 0 to negative power");
    return 1 / pow_rat(q, -e);
  }
  Rat r;
  mpz_pow_ui(r.get_num().get_mpz_t(), q.get_num().get_mpz_t(),
             static_cast<unsigned long>(e));
  mpz_pow_ui(r.get_den().get_mpz_t(), q.get_den().get_mpz_t(),
             static_cast<unsigned long>(e));
  r.canonicalize();
  return r;
}

Int pow_int(const Int& b, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

Rat round_down_dyadic(const Rat& q, unsigned long bits) {
  Int scaled_num = q.get_num() << bits;
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den().get_mpz_t());
  Rat r(f, Int(1) << bits);
  r.canonicalize();
  return r;
}

Rat round_up_dyadic(const Rat& q, unsigned long bits) {
  Int scaled_num = q.get_num() << bits;
  Int c;
  mpz_cdiv_q(c.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den().get_mpz_t());
  Rat r(c, Int(1) << bits);
  r.canonicalize();
  return r;
}

long floor_log2(const Rat& q) {
  if (q <= 0) throw std::invalid_argument("floor_log2 of non-positive value");
  long k = static_cast<long>(mpz_sizeinbase(q.get_num().get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.get_den().get_mpz_t(), 2));
  // sizeinbase is only accurate to one bit; fix up by direct comparison.
  auto le_pow2 = [&q](long e) {
    // 2^e <= q ?
    Rat p;
    if (e >= 0)
      p = Rat(Int(1) << e);
    else
      p = Rat(Int(1), Int(1) << (-e));
    return p <= q;
  };
  while (!le_pow2(k)) --k;
  while (le_pow2(k + 1)) ++k;
  return k;
}

std::string to_decimal_string(const Rat& q, unsigned digits) {
  const bool neg = q < 0;
  Rat a = neg ? Rat(-q) : q;
  Int scale = pow_int(Int(10), digits);
  Int t;
  mpz_fdiv_q(t.get_mpz_t(), Int(a.get_num() * scale).get_mpz_t(),
             a.get_den().get_mpz_t());
  Int ip = t / scale;
  Int fp = t % scale;
  std::string frac = fp.get_str();
  if (frac.size() < digits) frac.insert(0, digits - frac.size(), '0');
  std::string out = (neg ? "-" : "") + ip.get_str();
  if (digits > 0) out += "." + frac;
  return out;
}

}  // namespace ahmes
