#include "equid/charsum.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "equid/errors.hpp"

namespace equid {

namespace {

constexpr double kUnitRoundoff = 0x1p-52;
constexpr double kTermError = 0x1p-48;

struct KahanComplex {
  double re = 0, im = 0, c_re = 0, c_im = 0;
  void add(std::complex<double> z) {
    double y = z.real() - c_re;
    double t = re + y;
    c_re = (t - re) - y;
    re = t;
    y = z.imag() - c_im;
    t = im + y;
    c_im = (t - im) - y;
    im = t;
  }
  std::complex<double> value() const { return {re, im}; }
};

void check_tuple(std::span<const IntPoly> polys, std::span<const u64> tuple) {
  if (polys.empty()) throw PreconditionError("expsum: empty polynomial list");
  if (polys.size() != tuple.size()) throw PreconditionError("expsum: tuple length differs from system size");
}

// Coefficients of sum r_i G_i reduced mod m.
std::vector<u64> combined_residues(std::span<const IntPoly> polys, std::span<const u64> r, u64 m) {
  std::size_t len = 0;
  for (const auto& p : polys) len = std::max(len, p.coeffs().size());
  std::vector<u64> out(len, 0);
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const u64 ri = r[i] % m;
    if (ri == 0) continue;
    const auto c = polys[i].reduce_mod(m);
    for (std::size_t j = 0; j < c.size(); ++j) out[j] = add_mod(out[j], mul_mod(ri, c[j], m), m);
  }
  return out;
}

std::complex<double> direct_sum(std::span<const u64> coeffs, u64 m, const RootsOfUnity& roots) {
  KahanComplex acc;
  for (u64 v = 1; v < m; ++v) {
    if (std::gcd(v, m) != 1) continue;
    acc.add(roots[eval_residues(coeffs, v, m)]);
  }
  if (m == 1) acc.add(1.0);
  return acc.value();
}

}  // namespace

RootsOfUnity::RootsOfUnity(u64 m) : m_(m), table_(m) {
  if (m == 0) throw PreconditionError("RootsOfUnity: zero modulus");
  for (u64 k = 0; k < m; ++k) {
    const long double angle = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / m;
    table_[k] = {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
  }
}

ExpSumResult expsum_direct(std::span<const IntPoly> polys, std::span<const u64> tuple, const FactoredModulus& m) {
  check_tuple(polys, tuple);
  const u64 mv = m.value();
  RootsOfUnity roots(mv);
  const auto coeffs = combined_residues(polys, tuple, mv);
  ExpSumResult out;
  out.value = direct_sum(coeffs, mv, roots);
  out.modulus = mv;
  out.tuple.assign(tuple.begin(), tuple.end());
  out.abs_error_bound = static_cast<double>(mv) * kTermError;
  return out;
}

ExpSumResult expsum_crt(std::span<const IntPoly> polys, std::span<const u64> tuple, const FactoredModulus& m) {
  check_tuple(polys, tuple);
  const u64 mv = m.value();
  u64 g = mv;
  for (u64 r : tuple) g = std::gcd(g, r % mv);
  ExpSumResult out;
  out.modulus = mv;
  out.tuple.assign(tuple.begin(), tuple.end());
  const u64 Qp = mv / g;
  if (Qp == 1) {
    out.value = static_cast<double>(m.phi());
    out.abs_error_bound = 0.0;
    return out;
  }
  const FactoredModulus Q(Qp);
  std::complex<double> prod = static_cast<double>(m.phi()) / static_cast<double>(Q.phi());
  double rel_err = 0.0;
  for (const auto& f : Q.factors()) {
    const u64 cofactor = Qp / f.value;
    const u64 inv = *inverse_mod(cofactor % f.value, f.value);
    std::vector<u64> local(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i) local[i] = mul_mod((tuple[i] % mv) / g % f.value, inv, f.value);
    RootsOfUnity roots(f.value);
    const auto coeffs = combined_residues(polys, local, f.value);
    const auto z = direct_sum(coeffs, f.value, roots);
    const double err = static_cast<double>(f.value) * kTermError;
    rel_err += std::abs(z) > 0 ? err / std::abs(z) : 0.0;
    prod *= z;
    if (std::abs(z) < err) {
      // A vanishing factor: the product is zero up to err times the rest.
      rel_err = std::numeric_limits<double>::infinity();
    }
  }
  out.value = prod;
  if (std::isinf(rel_err)) {
    // Bound the product by err * trivial bound on the other factors.
    out.abs_error_bound = static_cast<double>(m.phi()) * static_cast<double>(Qp) * kTermError;
  } else {
    out.abs_error_bound = std::abs(prod) * (rel_err + 8 * kUnitRoundoff * Q.omega());
  }
  return out;
}

ExpSumResult expsum(std::span<const IntPoly> polys, std::span<const u64> tuple, const FactoredModulus& m) {
  auto direct = expsum_direct(polys, tuple, m);
  if (m.is_prime_power()) return direct;
  const auto crt = expsum_crt(polys, tuple, m);
  const double tol = direct.abs_error_bound + crt.abs_error_bound + 1e-9;
  if (std::abs(direct.value - crt.value) > tol)
    throw InvariantViolation("expsum: direct sum and CRT-factored product disagree at modulus " +
                             std::to_string(m.value()));
  return direct;
}

ExpSumResult expsum(const PolySystem& system, std::span<const u64> tuple, const FactoredModulus& m) {
  return expsum(system.polys(), tuple, m);
}

// ---------------------------------------------------------------------------

OrthogonalityCounter::OrthogonalityCounter(std::span<const IntPoly> polys, const FactoredModulus& m, u64 work_bound)
    : m_(m.value()), M_(polys.size()), roots_(m.value()) {
  if (polys.empty()) throw PreconditionError("OrthogonalityCounter: empty polynomial list");
  u64 tuples = 1;
  for (std::size_t i = 0; i < M_; ++i) {
    if (tuples > work_bound / m_) throw BudgetExceeded("orthogonality: m^M tuples exceed the work bound");
    tuples *= m_;
  }
  if (tuples > work_bound / m.phi()) throw BudgetExceeded("orthogonality: m^M * phi(m) exceeds the work bound");

  // values[i][v] = G_i(v) mod m, only for units v.
  std::vector<u64> units;
  for (u64 v = 1; v < m_; ++v)
    if (std::gcd(v, m_) == 1) units.push_back(v);
  std::vector<std::vector<u64>> values(M_, std::vector<u64>(units.size()));
  for (std::size_t i = 0; i < M_; ++i) {
    const auto c = polys[i].reduce_mod(m_);
    for (std::size_t j = 0; j < units.size(); ++j) values[i][j] = eval_residues(c, units[j], m_);
  }

  Z_.resize(tuples);
  Z_err_.assign(tuples, static_cast<double>(m_) * kTermError);
  std::vector<u64> r(M_, 0);
  std::vector<u64> phase(units.size());
  for (u64 code = 0; code < tuples; ++code) {
    u64 c = code;
    for (std::size_t i = 0; i < M_; ++i) {
      r[i] = c % m_;
      c /= m_;
    }
    std::fill(phase.begin(), phase.end(), 0);
    for (std::size_t i = 0; i < M_; ++i) {
      if (r[i] == 0) continue;
      for (std::size_t j = 0; j < units.size(); ++j) phase[j] = add_mod(phase[j], mul_mod(r[i], values[i][j], m_), m_);
    }
    KahanComplex acc;
    for (u64 ph : phase) acc.add(roots_[ph]);
    Z_[code] = acc.value();
  }
}

std::pair<std::complex<double>, double> OrthogonalityCounter::evaluate(unsigned N, std::span<const u64> w) const {
  if (N == 0) throw PreconditionError("orthogonality count: N must be >= 1");
  if (w.size() != M_) throw PreconditionError("orthogonality count: target length differs from system size");
  KahanComplex acc;
  double err = 0.0;
  double mass = 0.0;
  std::vector<u64> r(M_);
  for (u64 code = 0; code < Z_.size(); ++code) {
    u64 c = code, dot = 0;
    for (std::size_t i = 0; i < M_; ++i) {
      r[i] = c % m_;
      c /= m_;
      dot = add_mod(dot, mul_mod(r[i], w[i] % m_, m_), m_);
    }
    const std::complex<double> z = Z_[code];
    std::complex<double> zn = z;
    for (unsigned k = 1; k < N; ++k) zn *= z;
    const double az = std::abs(z);
    const double eps = Z_err_[code];
    // Perturbation of z^N from the error in z, plus roundoff in the powering.
    err += N * std::pow(az + eps, static_cast<double>(N - 1)) * eps;
    err += 4.0 * (N + 2) * kUnitRoundoff * std::pow(az, static_cast<double>(N));
    const std::complex<double> term = zn * roots_[(m_ - dot) % m_];
    mass += std::abs(term);
    acc.add(term);
  }
  err += 4.0 * kUnitRoundoff * mass;
  double scale = 1.0;
  for (std::size_t i = 0; i < M_; ++i) scale *= static_cast<double>(m_);
  return {acc.value() / scale, err / scale + 2.0 * kUnitRoundoff * std::abs(acc.value()) / scale};
}

u64 OrthogonalityCounter::count(unsigned N, std::span<const u64> w) const {
  const auto [value, err] = evaluate(N, w);
  const double rounded = std::nearbyint(value.real());
  const double residual = std::abs(value.real() - rounded);
  if (residual + err >= 0.5 || std::abs(value.imag()) + err >= 0.5)
    throw PrecisionLoss("orthogonality count: rounding not certified (residual " + std::to_string(residual) +
                        ", error bound " + std::to_string(err) + "); use the exact convolution count");
  if (rounded < 0) throw InvariantViolation("orthogonality count rounded to a negative value");
  if (rounded >= 0x1p53) throw PrecisionLoss("orthogonality count exceeds the exact double range");
  return static_cast<u64>(rounded);
}

u64 count_V_by_orthogonality(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& m,
                             std::span<const u64> w) {
  return OrthogonalityCounter(polys, m).count(N, w);
}

u64 count_V_by_orthogonality(const PolySystem& system, unsigned N, const FactoredModulus& m, std::span<const u64> w) {
  return count_V_by_orthogonality(system.polys(), N, m, w);
}

// ---------------------------------------------------------------------------

CZData cz_data(const IntPoly& F, u64 ell) {
  if (!is_prime(ell)) throw PreconditionError("cz_data: " + std::to_string(ell) + " is not prime");
  if (F.is_constant_mod(ell)) throw PreconditionError("cz_data: F is constant mod " + std::to_string(ell));
  const IntPoly dF = F.derivative();
  CZData out;
  out.t = dF.ord(ell).value();
  BigInt scale = boost::multiprecision::pow(BigInt(ell), static_cast<unsigned>(out.t));
  std::vector<u64> h;
  for (const auto& c : dF.coeffs()) h.push_back(reduce(c / scale, ell));
  while (!h.empty() && h.back() == 0) h.pop_back();
  out.reduced_derivative = h;

  // Multiplicity of each root by repeated synthetic division by (T - a).
  unsigned best = 0, best_nonzero = 0;
  for (u64 a = 0; a < ell && h.size() > 1; ++a) {
    std::vector<u64> cur = h;
    unsigned mult = 0;
    while (cur.size() > 1 && eval_residues(cur, a, ell) == 0) {
      std::vector<u64> quot(cur.size() - 1);
      u64 carry = 0;
      for (std::size_t i = cur.size(); i-- > 1;) {
        carry = add_mod(cur[i], mul_mod(carry, a, ell), ell);
        quot[i - 1] = carry;
      }
      cur = std::move(quot);
      while (!cur.empty() && cur.back() == 0) cur.pop_back();
      ++mult;
    }
    if (mult > 0) {
      out.critical_multiplicities.emplace_back(a, mult);
      best = std::max(best, mult);
      if (a != 0) best_nonzero = std::max(best_nonzero, mult);
    }
  }
  out.Mmult = best > 0 ? ExtNat(best) : ExtNat::infinity();
  out.Mmult_nonzero = best_nonzero > 0 ? ExtNat(best_nonzero) : ExtNat::infinity();
  return out;
}

// ---------------------------------------------------------------------------

WeilReport verify_weil(std::span<const IntPoly> polys, u64 ell, bool keep_rows) {
  if (polys.empty()) throw PreconditionError("verify_weil: empty polynomial list");
  if (!is_prime(ell)) throw PreconditionError("verify_weil: " + std::to_string(ell) + " is not prime");
  std::size_t D = 0;
  for (const auto& p : polys) D = std::max<std::size_t>(D, p.degree().value_or(0));
  if (ell <= D) throw PreconditionError("verify_weil: need ell > deg = " + std::to_string(D));

  const std::size_t M = polys.size();
  RootsOfUnity roots(ell);
  std::vector<std::vector<u64>> values(M, std::vector<u64>(ell));
  std::vector<std::vector<u64>> coeffs(M);
  for (std::size_t i = 0; i < M; ++i) {
    coeffs[i] = polys[i].reduce_mod(ell);
    coeffs[i].resize(D + 1, 0);
    for (u64 v = 1; v < ell; ++v) values[i][v] = eval_residues(coeffs[i], v, ell);
  }

  WeilReport rep;
  rep.ell = ell;
  u64 total = ipow(ell, static_cast<unsigned>(M));
  std::vector<u64> r(M), phase(ell);
  const double sqrt_ell = std::sqrt(static_cast<double>(ell));
  for (u64 code = 1; code < total; ++code) {
    u64 c = code;
    for (std::size_t i = 0; i < M; ++i) {
      r[i] = c % ell;
      c /= ell;
    }
    // Degree of F = sum r_i G_i reduced mod ell.
    std::size_t deg = 0;
    for (std::size_t j = D; j >= 1; --j) {
      u64 cj = 0;
      for (std::size_t i = 0; i < M; ++i) cj = add_mod(cj, mul_mod(r[i], coeffs[i][j], ell), ell);
      if (cj != 0) {
        deg = j;
        break;
      }
    }
    if (deg == 0) {
      rep.skipped.push_back(r);
      continue;
    }
    KahanComplex acc;
    for (u64 v = 1; v < ell; ++v) {
      u64 ph = 0;
      for (std::size_t i = 0; i < M; ++i) ph = add_mod(ph, mul_mod(r[i], values[i][v], ell), ell);
      acc.add(roots[ph]);
    }
    const double absz = std::abs(acc.value());
    const double bound = static_cast<double>(deg) * sqrt_ell;
    const double ratio = absz / bound;
    ++rep.checked;
    SumCheckRow row{ell, r, absz, bound, ratio};
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax = r;
    }
    if (ratio > 1.0 + kBoundTolerance) rep.violations.push_back(row);
    if (keep_rows) rep.rows.push_back(std::move(row));
  }
  return rep;
}

WeilReport verify_weil(const PolySystem& system, u64 ell, bool keep_rows) {
  return verify_weil(system.polys(), ell, keep_rows);
}

CZReport verify_cz(const IntPoly& F, u64 ell, unsigned e) {
  if (e == 0) throw PreconditionError("verify_cz: exponent must be >= 1");
  const CZData cz = cz_data(F, ell);
  CZReport rep;
  rep.ell = ell;
  rep.e = e;
  rep.t = cz.t;
  rep.Mmult = cz.Mmult;
  rep.D0 = *F.degree();
  const u64 needed = cz.t + (ell == 2 ? 3 : 2);
  if (e < needed) {
    rep.applicable = false;
    rep.note = "bound not applicable: e = " + std::to_string(e) + " < " + std::to_string(needed);
    return rep;
  }
  rep.applicable = true;
  const u64 q = ipow(ell, e);
  const FactoredModulus mod = FactoredModulus::from_factors({{ell, e, 0}});
  const IntPoly polys[] = {F};
  const u64 one[] = {1};
  const auto Z = expsum_direct(polys, one, mod);
  rep.abs_Z = std::abs(Z.value);
  const double lell = std::log(static_cast<double>(ell));
  double log_bound;
  if (cz.Mmult.is_infinite()) {
    log_bound = static_cast<double>(e) * lell;
  } else {
    const double inv = 1.0 / (static_cast<double>(cz.Mmult.value()) + 1.0);
    log_bound = (static_cast<double>(cz.t) * inv + static_cast<double>(e) * (1.0 - inv)) * lell;
  }
  rep.bound = static_cast<double>(rep.D0) * std::exp(log_bound) * (ell == 2 ? 2.0 : 1.0);
  rep.ratio = rep.abs_Z / rep.bound;
  rep.holds = rep.abs_Z <= rep.bound * (1.0 + kBoundTolerance) + Z.abs_error_bound;
  (void)q;
  return rep;
}

ValuationCheck invariant_factor_valuation(const PolySystem& system, u64 ell, std::span<const BigInt> r) {
  if (!is_prime(ell)) throw PreconditionError("valuation check: " + std::to_string(ell) + " is not prime");
  if (r.size() != system.M()) throw PreconditionError("valuation check: tuple length differs from M");
  bool unit_found = false;
  for (const auto& ri : r)
    if (reduce(ri, ell) != 0) unit_found = true;
  if (!unit_found) throw PreconditionError("valuation check: ell divides gcd(r_1..r_M)");
  const auto derivs = system.derivatives();
  const IntPoly comb = linear_combination(derivs, r);
  ValuationCheck out;
  out.t = comb.ord(ell);
  out.bound = system.beta_M() == 0 ? ExtNat::infinity() : ExtNat(valuation(system.beta_M(), ell));
  out.holds = out.t <= out.bound;
  return out;
}

bool invariant_factor_valuation_check(const PolySystem& system, u64 ell, std::span<const BigInt> r) {
  return invariant_factor_valuation(system, ell, r).holds;
}

}  // namespace equid
