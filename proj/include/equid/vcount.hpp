#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "equid/numtheory.hpp"
#include "equid/polysystem.hpp"

namespace equid {

/// counts[w] = #{(v_1..v_N) in U_q^N : sum_j G_i(v_j) = w_i mod q for all i},
/// stored densely with index w_1 + q w_2 + q^2 w_3 + ...
struct VDistribution {
  FactoredModulus q;
  std::size_t M = 0;
  unsigned N = 0;
  std::vector<u64> counts;

  std::size_t index(std::span<const u64> w) const;
  std::vector<u64> target(std::size_t index) const;
  u64 at(std::span<const u64> w) const { return counts[index(w)]; }
  u64 total() const;
};

inline constexpr u64 kDefaultCountBudget = 200'000'000;

VDistribution step_distribution(std::span<const IntPoly> polys, const FactoredModulus& q);
VDistribution step_distribution(const PolySystem& system, const FactoredModulus& q);

// N-fold convolution over (Z/q)^M directly at modulus q.
VDistribution distribution_direct(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q,
                                  u64 budget = kDefaultCountBudget);
// Same table, built per prime power of q and glued by CRT.
VDistribution distribution(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q,
                           u64 budget = kDefaultCountBudget);

// Single entry of the distribution: product of the prime-power counts at the
// CRT images of w. Throws BudgetExceeded when N q^M phi(q) exceeds the budget
// or phi(q)^N does not fit in 64 bits.
u64 count_exact(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q, std::span<const u64> w,
                u64 budget = kDefaultCountBudget);
u64 count_exact(const PolySystem& system, unsigned N, const FactoredModulus& q, std::span<const u64> w,
                u64 budget = kDefaultCountBudget);

/// count_exact with the prime-power tables built once, for answering many
/// targets at the same (N, q).
class ExactCounter {
 public:
  ExactCounter(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q, u64 budget = kDefaultCountBudget);
  u64 count(std::span<const u64> w) const;

 private:
  std::size_t M_;
  std::vector<VDistribution> parts_;
};

// prod over l^e || q with l <= C of l^min(e, R).
u64 compute_Q0(const FactoredModulus& q, u64 C, unsigned R);

struct Prop32Report {
  u64 q = 0;
  unsigned N = 0;
  u64 C = 0;
  unsigned R = 0;
  u64 Q0 = 1;
  u64 count_q = 0;
  u64 count_Q0 = 0;
  double lhs = 0.0;        // #V(q; w) / phi(q)^N
  double main_term = 0.0;  // (Q0/q)^M #V(Q0; w) / phi(Q0)^N
  double deviation = 0.0;  // |lhs - main| / main, infinite when main = 0
  double inv_C_pow_N = 0.0;
  double tail_envelope = 0.0;  // prod over l | q, l > C of (1 + (2D)^N / l^{N/D - M}) - 1
  double envelope() const { return inv_C_pow_N + tail_envelope; }
};

// Requires N >= MD + 1, C >= 2, R >= 2.
Prop32Report validate_prop32(const PolySystem& system, unsigned N, const FactoredModulus& q, std::span<const u64> w,
                             u64 C, unsigned R, u64 budget = kDefaultCountBudget);

// max over w of the one-step counts.
u64 xi_max(std::span<const IntPoly> polys, const FactoredModulus& q);
u64 xi_max(const PolySystem& system, const FactoredModulus& q);

// Writes "w_1,...,w_M,count" rows after a "#q=..,M=..,N=..,total=.." line.
void write_distribution_csv(const VDistribution& dist, std::ostream& out);

}  // namespace equid
