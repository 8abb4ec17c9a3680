#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace equid {

using BigInt = boost::multiprecision::cpp_int;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Nonnegative integer extended by +infinity. Used for valuations of the zero
// polynomial and for "no zero" root multiplicities.
class ExtNat {
 public:
  constexpr ExtNat() = default;
  constexpr explicit ExtNat(u64 v) : value_(v), infinite_(false) {}
  static constexpr ExtNat infinity() {
    ExtNat e;
    e.infinite_ = true;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr u64 value() const { return value_; }
  std::string to_string() const;

  friend constexpr bool operator==(const ExtNat& a, const ExtNat& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr bool operator<(const ExtNat& a, const ExtNat& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(const ExtNat& a, const ExtNat& b) { return !(b < a); }

 private:
  u64 value_ = 0;
  bool infinite_ = false;
};

// ---------------------------------------------------------------------------
// Word-size modular arithmetic. All moduli are >= 1 and results lie in [0, m).

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}
inline u64 add_mod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  if (s < a || s >= m) s -= m;
  return s;
}
u64 pow_mod(u64 base, u64 exp, u64 m);
std::optional<u64> inverse_mod(u64 a, u64 m);
u64 ipow(u64 base, unsigned exp);  // throws BudgetExceeded on overflow

// Residue of an arbitrary-precision integer.
u64 reduce(const BigInt& c, u64 m);

// v_ell(c) for c != 0.
unsigned valuation(BigInt c, u64 ell);
unsigned valuation(u64 c, u64 ell);

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

// ---------------------------------------------------------------------------

/// Dense polynomial in Z[T]; coefficient r multiplies T^r. Trailing zeros are
/// stripped on construction so equality is structural.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<BigInt> coeffs);
  IntPoly(std::initializer_list<long long> coeffs);

  static IntPoly constant(BigInt c);
  static IntPoly monomial(BigInt c, std::size_t degree);
  static IntPoly identity();  // T

  const std::vector<BigInt>& coeffs() const { return coeffs_; }
  BigInt coeff(std::size_t r) const;

  // nullopt stands for the degree of the zero polynomial (minus infinity).
  std::optional<std::size_t> degree() const;
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }

  IntPoly derivative() const;
  // Highest power of ell dividing every coefficient; infinity for zero.
  ExtNat ord(u64 ell) const;
  BigInt eval(const BigInt& v) const;
  u64 eval_mod(u64 v, u64 m) const;
  // Coefficients reduced into [0, m); not trimmed.
  std::vector<u64> reduce_mod(u64 m) const;
  bool is_constant_mod(u64 m) const;
  IntPoly pow(unsigned k) const;

  std::string to_string() const;

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const BigInt& k, const IntPoly& a);
  friend IntPoly operator-(const IntPoly& a);
  friend bool operator==(const IntPoly& a, const IntPoly& b) = default;

 private:
  void trim();
  std::vector<BigInt> coeffs_;
};

// Horner evaluation of an already-reduced coefficient vector.
u64 eval_residues(std::span<const u64> coeffs, u64 v, u64 m);

u64 poly_eval_mod(const IntPoly& p, u64 v, u64 m);
IntPoly poly_derivative(const IntPoly& p);
ExtNat poly_ord_ell(const IntPoly& p, u64 ell);

// Sum of k_i * polys_i.
IntPoly linear_combination(std::span<const IntPoly> polys, std::span<const BigInt> k);

// ---------------------------------------------------------------------------

struct PrimePower {
  u64 prime = 0;
  unsigned exponent = 0;
  u64 value = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

inline constexpr u64 kDefaultFactorBound = u64{1} << 63;

/// A modulus q > 1 together with its prime factorization, ascending in the
/// prime. All mod-q computation goes through this type.
class FactoredModulus {
 public:
  explicit FactoredModulus(u64 q, u64 bound = kDefaultFactorBound);
  static FactoredModulus from_factors(std::vector<PrimePower> factors);

  u64 value() const { return q_; }
  std::span<const PrimePower> factors() const { return factors_; }

  u64 phi() const;
  unsigned omega() const { return static_cast<unsigned>(factors_.size()); }
  unsigned big_omega() const;
  u64 smallest_prime() const { return factors_.front().prime; }
  u64 largest_prime() const { return factors_.back().prime; }
  unsigned valuation(u64 ell) const;
  bool is_prime_power() const { return factors_.size() == 1; }
  bool is_squarefree() const;
  bool is_unit(u64 v) const;
  // q / 2^{v_2(q)}
  u64 odd_part() const;

  friend bool operator==(const FactoredModulus& a, const FactoredModulus& b) {
    return a.q_ == b.q_;
  }

 private:
  FactoredModulus() = default;
  u64 q_ = 0;
  std::vector<PrimePower> factors_;
};

FactoredModulus factor(u64 q, u64 bound = kDefaultFactorBound);

u64 euler_phi(u64 n);

struct Congruence {
  u64 residue = 0;
  u64 modulus = 1;

  friend bool operator==(const Congruence&, const Congruence&) = default;
};

// Unique r mod prod(m_i) with r = r_i mod m_i. Moduli must be pairwise coprime.
Congruence crt_combine(std::span<const Congruence> parts);

}  // namespace equid
