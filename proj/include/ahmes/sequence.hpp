#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ahmes/rational.hpp"
#include "ahmes/schedule.hpp"

namespace ahmes {

enum class SeqKind {
  explicit_list,
  identity,
  constant,
  geometric,
  power_tower,
  sylvester,
  schedule_beta,
  schedule_gamma,
  constructed,
};

// Immutable positive integer sequence, 1-based. Copies share the memo
// tables, which only ever hold canonical values, so sharing is safe.
class Sequence {
 public:
  static Sequence explicit_list(std::vector<Int> values);
  // one integer per line; blank lines and '#' comments skipped
  static Sequence from_file(const std::string& path);
  static Sequence identity();
  static Sequence constant(Int v);
  static Sequence geometric(Int base);                     // base^n
  static Sequence power_tower(Int base, unsigned long k);  // base^(k^n)
  static Sequence sylvester();  // 2, 3, 7, 43, ... s' = s^2 - s + 1
  static Sequence schedule_beta(std::shared_ptr<const Schedule> s);
  static Sequence schedule_gamma(std::shared_ptr<const Schedule> s);
  // construction output: explicit prefix that is schedule-admissible from
  // repair_end on (a_n = n before that)
  static Sequence constructed(std::vector<Int> terms,
                              std::shared_ptr<const Schedule> s,
                              std::size_t repair_end);

  SeqKind kind() const;
  std::string describe() const;

  Int at(std::size_t n) const;  // throws IndexBeyondHorizon past a finite end
  std::optional<std::size_t> horizon() const;
  bool has_tail() const { return !horizon().has_value(); }

  // Certified r < 1 with a_m / a_{m+1} <= r for all m >= m0. Only the kinds
  // with provable geometric-or-better decay of the ratio support this;
  // everything else throws NoCertificate.
  Rat step_ratio_bound(std::size_t m0) const;

  // construction metadata (empty/0/null for other kinds)
  const std::vector<Int>& listed() const;
  std::shared_ptr<const Schedule> schedule() const;
  std::size_t repair_end() const;

 private:
  struct Impl;
  explicit Sequence(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

}  // namespace ahmes
