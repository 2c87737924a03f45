#include "ahmes/sequence.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "ahmes/errors.hpp"

namespace ahmes {

namespace {

// Same materialization guard as the enclosure kernels: refuse to build
// integers past ~2^26 bits instead of grinding the machine down.
constexpr unsigned long kMaxTermBits = 1ul << 26;

void check_term_bits(double bits_estimate, const char* what) {
  if (bits_estimate > static_cast<double>(kMaxTermBits))
    throw PrecisionCapExceeded(std::string(what) +
                               ": term exceeds the materialization cap");
}

}  // namespace

struct Sequence::Impl {
  SeqKind kind;
  std::vector<Int> values;  // explicit_list / constructed
  Int base = 0;             // constant value, geometric or tower base
  unsigned long tower_k = 0;
  std::shared_ptr<const Schedule> sched;
  std::size_t repair_end = 0;

  mutable std::mutex memo_mu;
  mutable std::vector<Int> sylvester_memo;  // sylvester_memo[i] = s_{i+1}
};

Sequence Sequence::explicit_list(std::vector<Int> values) {
  if (values.empty())
    throw std::invalid_argument("explicit sequence must be nonempty");
  for (const Int& v : values)
    if (v < 1)
      throw std::invalid_argument("sequence terms must be positive integers");
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::explicit_list;
  impl->values = std::move(values);
  return Sequence(std::move(impl));
}

Sequence Sequence::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sequence file: " + path);
  std::vector<Int> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank or comment-only line
    std::string rest;
    if (ls >> rest)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected one integer per line");
    try {
      values.push_back(Int(tok));
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": not an integer: " + tok);
    }
    if (values.back() < 1)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": terms must be positive");
  }
  if (values.empty())
    throw std::runtime_error(path + ": no terms found");
  return explicit_list(std::move(values));
}

Sequence Sequence::identity() {
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::identity;
  return Sequence(std::move(impl));
}

Sequence Sequence::constant(Int v) {
  if (v < 1) throw std::invalid_argument("constant sequence needs value >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::constant;
  impl->base = std::move(v);
  return Sequence(std::move(impl));
}

Sequence Sequence::geometric(Int base) {
  if (base < 2) throw std::invalid_argument("geometric base must be >= 2");
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::geometric;
  impl->base = std::move(base);
  return Sequence(std::move(impl));
}

Sequence Sequence::power_tower(Int base, unsigned long k) {
  if (base < 2) throw std::invalid_argument("tower base must be >= 2");
  if (k < 2) throw std::invalid_argument("tower exponent base must be >= 2");
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::power_tower;
  impl->base = std::move(base);
  impl->tower_k = k;
  return Sequence(std::move(impl));
}

Sequence Sequence::sylvester() {
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::sylvester;
  return Sequence(std::move(impl));
}

Sequence Sequence::schedule_beta(std::shared_ptr<const Schedule> s) {
  if (!s) throw std::invalid_argument("schedule sequence needs a schedule");
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::schedule_beta;
  impl->sched = std::move(s);
  return Sequence(std::move(impl));
}

Sequence Sequence::schedule_gamma(std::shared_ptr<const Schedule> s) {
  if (!s) throw std::invalid_argument("schedule sequence needs a schedule");
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::schedule_gamma;
  impl->sched = std::move(s);
  return Sequence(std::move(impl));
}

Sequence Sequence::constructed(std::vector<Int> terms,
                               std::shared_ptr<const Schedule> s,
                               std::size_t repair_end) {
  if (!s) throw std::invalid_argument("constructed sequence needs a schedule");
  if (terms.empty())
    throw std::invalid_argument("constructed sequence must be nonempty");
  auto impl = std::make_shared<Impl>();
  impl->kind = SeqKind::constructed;
  impl->values = std::move(terms);
  impl->sched = std::move(s);
  impl->repair_end = repair_end;
  return Sequence(std::move(impl));
}

SeqKind Sequence::kind() const { return impl_->kind; }

std::string Sequence::describe() const {
  switch (impl_->kind) {
    case SeqKind::explicit_list:
      return "list(" + std::to_string(impl_->values.size()) + " terms)";
    case SeqKind::identity:
      return "identity";
    case SeqKind::constant:
      return "constant(" + impl_->base.get_str() + ")";
    case SeqKind::geometric:
      return "geometric(" + impl_->base.get_str() + ")";
    case SeqKind::power_tower:
      return "tower(" + impl_->base.get_str() + "," +
             std::to_string(impl_->tower_k) + ")";
    case SeqKind::sylvester:
      return "sylvester";
    case SeqKind::schedule_beta:
      return "beta-envelope";
    case SeqKind::schedule_gamma:
      return "gamma-envelope";
    case SeqKind::constructed:
      return "constructed(" + std::to_string(impl_->values.size()) +
             " terms)";
  }
  return "?";
}

Int Sequence::at(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("sequence index starts at 1");
  switch (impl_->kind) {
    case SeqKind::explicit_list:
    case SeqKind::constructed:
      if (n > impl_->values.size())
        throw IndexBeyondHorizon("sequence has only " +
                                 std::to_string(impl_->values.size()) +
                                 " terms, asked for " + std::to_string(n));
      return impl_->values[n - 1];
    case SeqKind::identity:
      return Int(static_cast<unsigned long>(n));
    case SeqKind::constant:
      return impl_->base;
    case SeqKind::geometric: {
      check_term_bits(static_cast<double>(n) *
                          static_cast<double>(mpz_sizeinbase(
                              impl_->base.get_mpz_t(), 2)),
                      "geometric");
      return pow_int(impl_->base, static_cast<unsigned long>(n));
    }
    case SeqKind::power_tower: {
      // exponent k^n; the guard multiplies by the base's bit size
      double expo = 1;
      for (std::size_t i = 0; i < n; ++i) {
        expo *= static_cast<double>(impl_->tower_k);
        check_term_bits(expo, "tower");
      }
      check_term_bits(expo * static_cast<double>(mpz_sizeinbase(
                                 impl_->base.get_mpz_t(), 2)),
                      "tower");
      Int e = pow_int(Int(impl_->tower_k), static_cast<unsigned long>(n));
      return pow_int(impl_->base, e.get_ui());
    }
    case SeqKind::sylvester: {
      std::lock_guard<std::mutex> lock(impl_->memo_mu);
      auto& memo = impl_->sylvester_memo;
      if (memo.empty()) memo.push_back(Int(2));
      while (memo.size() < n) {
        const Int& s = memo.back();
        check_term_bits(2.0 * static_cast<double>(
                                  mpz_sizeinbase(s.get_mpz_t(), 2)),
                        "sylvester");
        memo.push_back(s * s - s + 1);
      }
      return memo[n - 1];
    }
    case SeqKind::schedule_beta:
      return impl_->sched->beta(n);
    case SeqKind::schedule_gamma:
      return impl_->sched->gamma(n);
  }
  throw std::logic_error("unreachable sequence kind");
}

std::optional<std::size_t> Sequence::horizon() const {
  if (impl_->kind == SeqKind::explicit_list ||
      impl_->kind == SeqKind::constructed)
    return impl_->values.size();
  return std::nullopt;
}

Rat Sequence::step_ratio_bound(std::size_t m0) const {
  if (m0 == 0) throw std::invalid_argument("step_ratio_bound: m0 >= 1");
  switch (impl_->kind) {
    case SeqKind::geometric:
      // a_m / a_{m+1} = 1/base exactly, for every m
      return Rat(1) / Rat(impl_->base);
    case SeqKind::power_tower: {
      // ratio = base^-(k^m (k-1)); the exponent grows with m, and capping
      // it at 64 keeps the bound materializable while staying valid
      unsigned long gap = 1;
      for (std::size_t i = 0; i < m0 && gap < 64; ++i) gap *= impl_->tower_k;
      gap = gap >= 64 ? 64 : gap * (impl_->tower_k - 1);
      if (gap > 64) gap = 64;
      return Rat(1) / Rat(pow_int(impl_->base, gap));
    }
    case SeqKind::sylvester:
      // s_m / s_{m+1} = s/(s^2-s+1) is decreasing in s >= 2 and the terms
      // increase, so the first ratio bounds the rest
      return Rat(at(m0)) / Rat(at(m0 + 1));
    case SeqKind::schedule_beta:
    case SeqKind::schedule_gamma:
      return impl_->sched->envelope_step_ratio(m0);
    case SeqKind::explicit_list:
    case SeqKind::constructed:
      throw NoCertificate("finite sequence has no tail to bound");
    case SeqKind::identity:
    case SeqKind::constant:
      throw NoCertificate("step ratio does not stay below 1 for " +
                          describe());
  }
  throw std::logic_error("unreachable sequence kind");
}

const std::vector<Int>& Sequence::listed() const { return impl_->values; }

std::shared_ptr<const Schedule> Sequence::schedule() const {
  return impl_->sched;
}

std::size_t Sequence::repair_end() const { return impl_->repair_end; }

}  // namespace ahmes
