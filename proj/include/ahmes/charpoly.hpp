#pragma once

#include <cstddef>
#include <vector>

#include "ahmes/enclosure.hpp"
#include "ahmes/rational.hpp"

namespace ahmes {

// Nonnegative integer weights (w_0, ..., w_{d-1}) with w_{d-1} >= 1.
// Two derived quantities matter and they are NOT interchangeable:
// max_weight W = max_j w_j enters the root polynomial and the clearing
// products, while total() = sum_j w_j counts the step factors a ratio
// x_n / x_{n+1} decomposes into.
class WeightVector {
 public:
  explicit WeightVector(std::vector<unsigned long> w);

  std::size_t d() const { return w_.size(); }
  unsigned long at(std::size_t j) const { return w_.at(j); }
  const std::vector<unsigned long>& raw() const { return w_; }
  const Int& total() const { return total_; }
  unsigned long max_weight() const { return max_; }

  bool operator==(const WeightVector& o) const { return w_ == o.w_; }

 private:
  std::vector<unsigned long> w_;
  Int total_;
  unsigned long max_ = 0;
};

// Dense integer polynomial, coeffs[j] multiplies x^j, trailing zeros trimmed.
struct IntPolynomial {
  std::vector<Int> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  void normalize();
  bool operator==(const IntPolynomial& o) const { return coeffs == o.coeffs; }
};

Rat eval_at(const IntPolynomial& p, const Rat& x);
IntPolynomial derivative(const IntPolynomial& p);

// (x - 1) * sum_j w_j x^j - W x^(d-1): the polynomial whose unique root in
// (1, inf) is the growth rate c_w of the weighted product x_n.
IntPolynomial char_poly(const WeightVector& w);

// (x - 1) * sum_j w_j x^j - x^(d-1): largest positive root c~_w drives the
// construction schedule exponents.
IntPolynomial companion_poly(const WeightVector& w);

enum class RootKind { unique_positive, largest_positive };

// Certified bracket around a real root in (1, inf). Keeps the polynomial so
// the bracket can be re-narrowed later without reproving isolation.
struct RootEnclosure {
  Rat lo;
  Rat hi;
  IntPolynomial poly;
  RootKind kind;

  Enclosure as_enclosure() const { return Enclosure(lo, hi); }
};

// Isolates per `kind` over (1, upper_bound]:
//  - unique_positive proves there is exactly one root there (Sturm count)
//    and fails with IsolationFailed otherwise;
//  - largest_positive brackets the largest root and certifies the interval
//    above `hi` root-free.
// Bisection uses dyadic midpoints; an exact root hit yields a point bracket.
// Requires positive leading coefficient and value < 0 at x = 1.
RootEnclosure isolate_root(const IntPolynomial& p, RootKind kind,
                           const Precision& prec);

// Same bracket, narrowed to width <= eps. Deterministic: the same starting
// bracket and eps always yield the same endpoints.
RootEnclosure refine(const RootEnclosure& r, const Rat& eps);

// Root of x^d - x^(d-1) - 1, i.e. the all-ones weight vector of length d.
// Doubles as the threshold constant of the main growth criterion.
RootEnclosure allones_root(std::size_t d, const Precision& prec);

// Distinct real roots of p in (a, b], by Sturm sign variations.
int count_roots(const IntPolynomial& p, const Rat& a, const Rat& b);

}  // namespace ahmes
