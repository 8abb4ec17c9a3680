#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equid/delange.hpp"
#include "equid/polysystem.hpp"
#include "equid/sieve.hpp"

namespace equid {

// Exponent K in the admissible range q <= (log x)^K.
inline constexpr double kDefaultLogPowerK = 2.0;

// Throws PreconditionError unless q <= (log x)^K.
void require_q_in_log_range(u64 q, u64 x, double K);

// Nonzero integer roots of G, ascending by absolute value.
std::vector<BigInt> nonzero_integer_roots(const IntPoly& G);

struct Cex41Report {
  IntPoly G;
  BigInt a;  // the nonzero root used
  std::size_t M = 0;
  u64 q = 0;
  u64 x = 0;
  BigInt C0;
  u64 count_zero_class = 0;
  double expected = 0.0;  // x / q^M
  double ratio = 0.0;
  u64 primes_in_class = 0;  // pi(x; q, a)
  JointCountTable table;
};

// G monic with a nonzero integer root a; G_i = G^i for i = 1..M, STRONG rule.
Cex41Report run_counterexample_4_1(const IntPoly& G, std::size_t M, u64 q, u64 x, const SieveRange& sieve,
                                   double K = kDefaultLogPowerK);

struct Cex61Report {
  u64 q = 0;
  u64 x = 0;
  BigInt C0;
  u64 count_zero_class = 0;
  u64 total_restricted = 0;
  double expected_restricted = 0.0;  // total_restricted / q^2
  double expected_plain = 0.0;       // x / q^2
  double predicted_scale = 0.0;      // x log log x / (q log x)
  double ratio_restricted = 0.0;
  JointCountTable table;
};

// System (T, T^3) under the STRONG rule, inputs with P_2(n) > q.
Cex61Report run_counterexample_6_1(u64 q, u64 x, const SieveRange& sieve, double K = kDefaultLogPowerK);

struct Thm14Report {
  std::vector<IntPoly> polys;  // G_1..G_M
  std::vector<BigInt> a;
  unsigned R = 0;
  u64 q = 0;
  u64 x = 0;
  BigInt computable_constant;  // max{C1, C0(G_1..G_{M-1})}
  bool R_exceeds_constant = false;
  std::vector<u64> b;  // b_1..b_M with the computed b_M last
  BigInt b_M;
  u64 count = 0;
  u64 total_restricted = 0;
  double expected_plain = 0.0;      // x / q^M
  double predicted_scale = 0.0;     // x (log log x)^{R-1} / (q^{M-1} log x)
  double ratio_plain = 0.0;
  JointCountTable table;
};

// G_M' = sum a_i G_i' and G_M(0) != sum a_i G_i(0) are checked; the failing
// identity is named in the error. STRONG rule throughout.
Thm14Report run_thm_1_4(std::span<const IntPoly> Gs, std::span<const BigInt> a, const IntPoly& G_M, unsigned R,
                        u64 q, u64 x, std::span<const BigInt> b, const SieveRange& sieve,
                        double K = kDefaultLogPowerK);

BigInt thm_1_4_b_M(std::span<const IntPoly> Gs, std::span<const BigInt> a, const IntPoly& G_M, unsigned R,
                   std::span<const BigInt> b);

struct RestrictionComparison {
  u64 q = 0;
  u64 x = 0;
  unsigned k = 0;
  std::optional<bool> in_Q;  // joint equidistribution mod q, when decided
  JointCountTable unrestricted;
  JointCountTable restricted;
  double dev_unrestricted = 0.0;
  std::optional<double> dev_restricted;  // absent when no n passes
  bool restricted_not_worse() const { return dev_restricted && *dev_restricted <= dev_unrestricted; }
};

RestrictionComparison compare_restriction(std::span<const AdditiveFunction> gs, u64 q, u64 x, unsigned k,
                                          const SieveRange& sieve);
// k = MD + 1; requires Q-independent derivatives and D >= 2.
RestrictionComparison run_thm_1_2(std::span<const AdditiveFunction> gs, u64 q, u64 x, const SieveRange& sieve);
// k = 2M; requires Q-independent derivatives, M >= 2 and q squarefree.
RestrictionComparison run_thm_1_3(std::span<const AdditiveFunction> gs, u64 q, u64 x, const SieveRange& sieve);

}  // namespace equid
