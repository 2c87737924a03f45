#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "ahmes/charpoly.hpp"
#include "ahmes/enclosure.hpp"

namespace ahmes {

// Index window envelope for the constructor: at index n the admissible
// values are the integers [beta_n, gamma_n] with
//   beta_n  = floor(C^(c~^n + n^2 + 1))
//   gamma_n = floor(C^(c~^n + n^2 + n))
// where c~ is the largest positive root of the companion polynomial of w.
// Floors are exact integers (certified through floor_power) and memoized;
// every memoized value is canonical, so lookups are order-independent.
class Schedule {
 public:
  Schedule(WeightVector w, Rat growth_base);

  const WeightVector& weights() const { return w_; }
  const Rat& base() const { return C_; }

  // companion root at the declared isolation width (deterministic)
  const RootEnclosure& companion() const { return root_; }
  const Rat& companion_eps() const { return root_eps_; }

  Int beta(std::size_t n) const;
  Int gamma(std::size_t n) const;

  // Certified r < 1 with a_m / a_{m+1} <= r for every m >= m0 and every
  // admissible per-index choice a_m in [beta_m, gamma_m]. Derivation:
  // gamma_m <= C^(c^m + m^2 + m), beta_{m+1} >= C^(c^(m+1) + (m+1)^2 + 1) - 1,
  // and the exponent gap G(m) = (c-1)c^m + m + 2 grows with m, so
  // 2 C^-G(m0) dominates every later ratio once C^(beta exponent) >= 2.
  // Throws NoCertificate when that bound cannot be pushed below 1.
  Rat envelope_step_ratio(std::size_t m0) const;

  // Certifies gamma_m < beta_{m+1} for every m > horizon (not just the
  // exactly-checked window): the floor comparison follows from
  // C^G(m) >= 2 plus monotone exponent growth.
  bool monotone_beyond(std::size_t horizon) const;

 private:
  Enclosure exponent_power(std::size_t n, const Rat& width) const;
  Int floor_env(std::size_t n, unsigned long extra) const;

  WeightVector w_;
  Rat C_;
  RootEnclosure root_;
  Rat root_eps_;
  mutable std::mutex memo_mu_;
  mutable std::map<std::size_t, Int> beta_memo_;
  mutable std::map<std::size_t, Int> gamma_memo_;
  // progressively narrowed copy of root_, reused across exponent floors so
  // deep floors never re-pay earlier refinement work; only the (canonical)
  // floor integers depend on it, never a certified bound
  mutable RootEnclosure sharp_;
};

std::pair<Int, Int> schedule_bounds(const Schedule& s, std::size_t n);

enum class CoverVerdict { pass, fail, undecided };

// Worst-case form of the bracket-overlap inequality at index N: the left
// side is minimized over all admissible prefixes
//   L = (beta_{N-d+2}/gamma_{N-d+3})^w_0 ... (beta_N/gamma_{N+1})^w_{d-2}
//       * (beta_{N+1}/beta_{N+2})^w_{d-1} * beta_{N+1}
// and the right side majorized using a_{N+1} >= beta_{N+1} together with
// x(1 - (x/(x+1))^k) <= k, giving U = w_{d-1} / D_min with
//   D_min = (beta_{N+1}/(beta_{N+1}+1))^w_{d-2} - (beta_{N+2}/gamma_{N+2})^w_{d-1}.
// pass iff D_min > 0 and L > U; the d = 1 case degenerates to an empty
// leading product and a 0-exponent first term in D_min.
CoverVerdict covering_check(const WeightVector& w,
                            const std::function<Int(std::size_t)>& beta,
                            const std::function<Int(std::size_t)>& gamma,
                            std::size_t N);

CoverVerdict covering_check(const Schedule& s, std::size_t N);

}  // namespace ahmes
