#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "equid/numtheory.hpp"

namespace equid {

using Rational = boost::multiprecision::cpp_rational;

enum class PrimePowerRule {
  Complete,  // g(p^k) = k * G(p)
  Strong,    // g(p^k) = G(p)
  Poly,      // g(p^k) = G(p^k)
  Table,     // explicit g(2^r) for r <= r_max, fallback rule at odd primes
};

std::string to_string(PrimePowerRule rule);
PrimePowerRule parse_rule(const std::string& name);

/// Parity of g(2^r) as a function of r >= 1: explicit values for
/// r = 1..prefix.size(), then a tail that depends only on the parity of r.
/// Every supported rule (and every integer combination of them) fits this shape.
struct ParityProfile {
  std::vector<std::uint8_t> prefix;
  std::uint8_t tail_odd_r = 0;
  std::uint8_t tail_even_r = 0;

  std::uint8_t at(std::size_t r) const;
  bool odd_for_all_r() const;
  // sum of k_i * profile_i mod 2
  static ParityProfile combine(std::span<const ParityProfile> profiles, std::span<const u64> k);
};

/// Additive function with g(p) = G(p) at every prime p and a rule for the
/// values at higher prime powers. g(1) = 0.
class AdditiveFunction {
 public:
  static AdditiveFunction complete(IntPoly G);
  static AdditiveFunction strong(IntPoly G);
  static AdditiveFunction poly(IntPoly G);
  // two_power_values[r-1] = g(2^r); the first entry must equal G(2).
  // eventual_parity is the parity of g(2^r) for r beyond the table (0 or 1),
  // nullopt when undeclared. Odd prime powers follow `fallback`.
  static AdditiveFunction table(IntPoly G, std::vector<BigInt> two_power_values,
                                std::optional<int> eventual_parity,
                                PrimePowerRule fallback = PrimePowerRule::Strong);
  static AdditiveFunction with_rule(IntPoly G, PrimePowerRule rule);

  const IntPoly& G() const { return G_; }
  PrimePowerRule rule() const { return rule_; }
  PrimePowerRule fallback() const { return fallback_; }
  std::span<const BigInt> two_power_table() const { return table_; }
  std::optional<int> eventual_parity() const { return eventual_parity_; }

  BigInt value_at_prime_power(u64 p, unsigned k) const;
  u64 value_at_prime_power_mod(u64 p, unsigned k, u64 q) const;
  // Throws PreconditionError for a table rule without declared eventual parity.
  ParityProfile two_power_parity() const;

 private:
  AdditiveFunction(IntPoly G, PrimePowerRule rule);
  IntPoly G_;
  PrimePowerRule rule_;
  PrimePowerRule fallback_ = PrimePowerRule::Strong;
  std::vector<BigInt> table_;
  std::optional<int> eventual_parity_;
};

struct Witness {
  enum class Kind {
    OddPrime,     // S_ell converges for an odd prime ell | q
    TwoAdic,      // one of the 2-adic conditions fails
    Combination,  // a gcd-1 combination of the family is not equidistributed
    Dependence,   // the G_i are F_ell-dependent for some ell | q
  };
  Kind kind = Kind::OddPrime;
  u64 prime = 0;
  std::vector<u64> combination;
  std::string reason;
};

struct EquidVerdict {
  bool equidistributed = true;
  std::optional<Witness> witness;
  std::string path;  // "single", "fast" or "slow"
};

std::string to_string(Witness::Kind kind);

// Proportion of units v mod q with G(v) a unit, as the product of the
// per-prime proportions.
Rational alpha(const IntPoly& G, const FactoredModulus& q);
Rational alpha_prime(const IntPoly& G, u64 ell);
// (1/phi(d)) #{r in U_d : d does not divide G(r)}. G may be constant.
Rational beta_prop(const IntPoly& G, u64 d);

// Delange's single-function criterion for g(p) = G(p), with divergence of
// S_d decided by beta_prop(G, d) != 0. Handles constant G.
EquidVerdict delange_single_verdict(const IntPoly& G, const ParityProfile& parity, const FactoredModulus& q);
// The closed-form description in terms of alpha_G; G must be nonconstant.
// Kept as an independent route for cross-checks.
EquidVerdict alpha_form_verdict(const IntPoly& G, const ParityProfile& parity, const FactoredModulus& q);

EquidVerdict is_equidistributed_single(const AdditiveFunction& g, const FactoredModulus& q);

// Verdict for sum k_i g_i mod q.
EquidVerdict combination_verdict(std::span<const AdditiveFunction> gs, std::span<const u64> k,
                                 const FactoredModulus& q);

struct JointOptions {
  bool force_slow = false;
  // Maximum q^M tuples the exhaustive path may enumerate.
  u64 work_bound = 10'000'000;
};

// Throws BudgetExceeded when the exhaustive path is needed but q^M exceeds
// the work bound (undecided).
EquidVerdict is_jointly_equidistributed(std::span<const AdditiveFunction> gs, const FactoredModulus& q,
                                        const JointOptions& options = {});

bool membership_Q(std::span<const AdditiveFunction> gs, const FactoredModulus& q,
                  const JointOptions& options = {});

}  // namespace equid
