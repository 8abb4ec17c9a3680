#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "equid/numtheory.hpp"
#include "equid/polysystem.hpp"

namespace equid {

/// e(k/m) for k in [0, m), computed once per modulus.
class RootsOfUnity {
 public:
  explicit RootsOfUnity(u64 m);
  u64 modulus() const { return m_; }
  const std::complex<double>& operator[](u64 k) const { return table_[k]; }

 private:
  u64 m_;
  std::vector<std::complex<double>> table_;
};

struct ExpSumResult {
  std::complex<double> value;
  u64 modulus = 0;
  std::vector<u64> tuple;
  double abs_error_bound = 0.0;
};

// Z_{m; r} = sum over v in U_m of e(sum_i r_i G_i(v) / m). For composite m the
// direct sum is cross-checked against the CRT-factored product and a
// disagreement raises InvariantViolation.
ExpSumResult expsum(std::span<const IntPoly> polys, std::span<const u64> tuple, const FactoredModulus& m);
ExpSumResult expsum(const PolySystem& system, std::span<const u64> tuple, const FactoredModulus& m);
ExpSumResult expsum_direct(std::span<const IntPoly> polys, std::span<const u64> tuple, const FactoredModulus& m);
// phi(m)/phi(Q') * prod over l^e || Q' of Z_{l^e; r'_l}, with Q' = m / gcd(m, r).
ExpSumResult expsum_crt(std::span<const IntPoly> polys, std::span<const u64> tuple, const FactoredModulus& m);

/// Counts #V_{N,M}(m; w) through the additive-character expansion
///   #V = m^{-M} sum_r e(-<r, w>/m) Z_{m; r}^N
/// with every Z_{m; r} tabulated up front. The expansion holds for any m >= 2.
class OrthogonalityCounter {
 public:
  // Throws BudgetExceeded when m^M * phi(m) exceeds work_bound.
  OrthogonalityCounter(std::span<const IntPoly> polys, const FactoredModulus& m, u64 work_bound = 200'000'000);

  // Rounded count; PrecisionLoss if the propagated error could flip the
  // rounding.
  u64 count(unsigned N, std::span<const u64> w) const;
  // Unrounded value and its error bound.
  std::pair<std::complex<double>, double> evaluate(unsigned N, std::span<const u64> w) const;

  u64 modulus() const { return m_; }
  std::size_t M() const { return M_; }

 private:
  u64 m_;
  std::size_t M_;
  RootsOfUnity roots_;
  std::vector<std::complex<double>> Z_;
  std::vector<double> Z_err_;
};

u64 count_V_by_orthogonality(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& m,
                             std::span<const u64> w);
u64 count_V_by_orthogonality(const PolySystem& system, unsigned N, const FactoredModulus& m, std::span<const u64> w);

struct CZData {
  u64 t = 0;                   // ord_ell(F')
  ExtNat Mmult;                // max multiplicity over all zeros in F_ell
  ExtNat Mmult_nonzero;        // same, over nonzero zeros only
  std::vector<std::pair<u64, unsigned>> critical_multiplicities;  // root -> multiplicity
  std::vector<u64> reduced_derivative;  // ell^{-t} F' mod ell, trimmed
};

// Throws PreconditionError if F is constant mod ell or ell is not prime.
CZData cz_data(const IntPoly& F, u64 ell);

struct SumCheckRow {
  u64 modulus = 0;
  std::vector<u64> tuple;
  double abs_Z = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct WeilReport {
  u64 ell = 0;
  std::size_t checked = 0;
  double max_ratio = 0.0;
  std::vector<u64> argmax;
  std::vector<std::vector<u64>> skipped;  // combinations constant mod ell
  std::vector<SumCheckRow> violations;    // ratio > 1 + 1e-6
  std::vector<SumCheckRow> rows;          // filled when requested
};

inline constexpr double kBoundTolerance = 1e-6;

// Every tuple r mod ell other than 0: |Z_{ell; r}| against deg(F mod ell) sqrt(ell)
// with F = sum r_i G_i. Requires ell prime and ell > max deg G_i.
WeilReport verify_weil(std::span<const IntPoly> polys, u64 ell, bool keep_rows = false);
WeilReport verify_weil(const PolySystem& system, u64 ell, bool keep_rows = false);

struct CZReport {
  bool applicable = false;
  bool holds = true;
  u64 ell = 0;
  unsigned e = 0;
  u64 t = 0;
  ExtNat Mmult;
  std::size_t D0 = 0;
  double abs_Z = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  std::string note;
};

// Prime-power bound check for the sum of e(F(v)/ell^e) over units v. Outside
// the applicable range of e the report says so instead of failing.
CZReport verify_cz(const IntPoly& F, u64 ell, unsigned e);

struct ValuationCheck {
  ExtNat t;      // ord_ell(sum r_i G_i')
  ExtNat bound;  // v_ell(beta_M), infinite when beta_M = 0
  bool holds = true;
};

// Requires ell prime not dividing gcd(r_1..r_M).
ValuationCheck invariant_factor_valuation(const PolySystem& system, u64 ell, std::span<const BigInt> r);
bool invariant_factor_valuation_check(const PolySystem& system, u64 ell, std::span<const BigInt> r);

}  // namespace equid
