#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "equid/delange.hpp"
#include "equid/numtheory.hpp"

namespace equid {

inline constexpr u64 kDefaultSieveBudget = 200'000'000;

/// Smallest-prime-factor table for [0, x]; spf[0] = spf[1] = 0.
struct SieveRange {
  u64 x = 0;
  std::size_t segment_size = 0;
  std::vector<std::uint32_t> spf;

  bool is_prime(u64 n) const { return n >= 2 && spf[n] == n; }
};

// Throws BudgetExceeded when x exceeds the budget.
SieveRange build_sieve(u64 x, u64 budget = kDefaultSieveBudget, std::size_t segment_size = 1 << 18);

// (p, k) for p^k || n, ascending in p; empty for n = 1.
std::vector<std::pair<u64, unsigned>> factorize(u64 n, const SieveRange& sieve);

BigInt eval_additive(const AdditiveFunction& g, u64 n, const SieveRange& sieve);
u64 eval_additive_mod(const AdditiveFunction& g, u64 n, u64 q, const SieveRange& sieve);

// k-th largest prime factor with multiplicity, 1 when Omega(n) < k.
u64 pk_largest(u64 n, unsigned k, const SieveRange& sieve);
unsigned big_omega(u64 n, const SieveRange& sieve);
// Sum of k over p^k || n with p > q and k > 1.
unsigned omega_star_gt_q(u64 n, u64 q, const SieveRange& sieve);

struct Restriction {
  enum class Kind { None, PkGtQ, Convenient };
  Kind kind = Kind::None;
  unsigned k = 0;  // PkGtQ: keep n with P_k(n) > q
  unsigned J = 0;  // Convenient: the J largest prime factors exceed y and divide n exactly
  double y = 0.0;

  static Restriction none() { return {}; }
  static Restriction pk_gt_q(unsigned k);
  static Restriction convenient(unsigned J, double y);
  // J = floor(log log log x), y = exp(sqrt(log x)); J is clamped at 0.
  static Restriction convenient_for(double x);

  bool admits(u64 n, u64 q, const SieveRange& sieve) const;
  std::string to_string() const;
};

// "none", "pk:K", "convenient" (parameters from x) or "convenient:J:y".
Restriction parse_restriction(const std::string& text, double x);

struct JointCountTable {
  u64 q = 0;
  std::size_t M = 0;
  u64 x = 0;
  Restriction restriction;
  std::vector<u64> counts;  // index b_1 + q b_2 + ...
  u64 total_restricted = 0;

  u64 at(std::span<const u64> b) const;
  std::vector<u64> cls(std::size_t index) const;
};

inline constexpr u64 kMaxCountCells = 100'000'000;

// One pass over 1 <= n <= x. Requires x <= sieve.x. With threads > 1 the range
// is split into contiguous blocks with private tables merged at the end, so
// the result does not depend on the thread count.
JointCountTable joint_counts(std::span<const AdditiveFunction> gs, u64 q, const SieveRange& sieve, u64 x,
                             const Restriction& restriction = {}, unsigned threads = 1);

struct DiscrepancyReport {
  u64 q = 0;
  u64 x = 0;
  Restriction restriction;
  std::size_t M = 0;
  u64 total = 0;
  double max_rel_dev = 0.0;
  std::vector<u64> argmax;
};

// Throws PreconditionError on an empty table.
DiscrepancyReport discrepancy(const JointCountTable& table);

// "#x=..,M=..,restriction=.." then "q,total,max_rel_dev" rows, one per
// report. All reports must share x, M and the restriction.
void write_discrepancy_csv(std::span<const DiscrepancyReport> reports, std::ostream& out);
// "#x=..,q=..,M=..,restriction=..,total=.." then "b_1,...,b_M,count" rows.
void write_counts_csv(const JointCountTable& table, std::ostream& out);

// pi(x; q, a) from the sieve.
u64 count_primes_in_class(const SieveRange& sieve, u64 x, u64 q, u64 a);

}  // namespace equid
