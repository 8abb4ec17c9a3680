#pragma once

#include <optional>
#include <span>
#include <vector>

#include "equid/numtheory.hpp"

namespace equid {

/// Row-major integer matrix with arbitrary-precision entries.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  bool is_zero() const;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

// Exact determinant (fraction-free Bareiss elimination).
BigInt determinant(const IntMatrix& a);
std::size_t rank_over_Q(const IntMatrix& a);
std::size_t rank_mod_prime(const IntMatrix& a, u64 ell);

struct SmithForm {
  IntMatrix S;  // same shape as the input, diagonal
  IntMatrix P;  // rows x rows, unimodular
  IntMatrix R;  // cols x cols, unimodular
  // Diagonal of S, length min(rows, cols); nonnegative, each divides the next.
  std::vector<BigInt> diagonal;
};

// P * A * R = S with S diagonal and d_i | d_{i+1}. Throws PreconditionError on
// the zero matrix.
SmithForm smith_normal_form(const IntMatrix& a);

// Column i holds the coefficients of polys[i], ascending; `rows` rows (at
// least the largest length).
IntMatrix coefficient_matrix(std::span<const IntPoly> polys, std::size_t rows = 0);

bool is_indep_over_Q(std::span<const IntPoly> polys);
// Throws PreconditionError if ell is not prime.
bool is_indep_mod_ell(std::span<const IntPoly> polys, u64 ell);

/// The vector (G_1, ..., G_M) of nonconstant polynomials with its coefficient
/// matrix of derivatives A0 (D x M), the invariant factors of A0 and the
/// constant C0 beyond which the derivatives stay independent mod every prime.
class PolySystem {
 public:
  static PolySystem build(std::vector<IntPoly> polys);

  std::span<const IntPoly> polys() const { return polys_; }
  const IntPoly& poly(std::size_t i) const { return polys_[i]; }
  std::size_t M() const { return polys_.size(); }
  std::size_t D() const { return D_; }
  std::size_t Dmin() const { return Dmin_; }
  const IntMatrix& A0() const { return A0_; }
  const SmithForm& smith() const { return smith_; }
  // beta_1 | ... | beta_M; trailing zeros when the derivatives are dependent.
  std::span<const BigInt> invariant_factors() const { return betas_; }
  const BigInt& beta_M() const { return betas_.back(); }
  bool derivatives_independent() const { return derivs_independent_; }
  // max{D+1, |beta_M|} + 1; absent when the derivatives are Q-dependent.
  const std::optional<BigInt>& C0() const { return C0_; }
  std::vector<IntPoly> derivatives() const;

 private:
  std::vector<IntPoly> polys_;
  std::size_t D_ = 0;
  std::size_t Dmin_ = 0;
  IntMatrix A0_;
  SmithForm smith_;
  std::vector<BigInt> betas_;
  bool derivs_independent_ = false;
  std::optional<BigInt> C0_;
};

// Least admissible constant exceeding max{D+1, |beta_M|} for an arbitrary list
// of polynomials: the primes at which `polys` become F_ell-dependent all lie
// at or below it. nullopt when the list is Q-dependent. Used for C1 (on the
// G_i themselves) as well as for C0 (on the derivatives).
std::optional<BigInt> independence_constant(std::span<const IntPoly> polys, std::size_t D);

}  // namespace equid
