#include "equid/polysystem.hpp"

#include <algorithm>
#include <utility>

#include "equid/errors.hpp"

namespace equid {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw PreconditionError("IntMatrix: ragged initializer");
    for (long long v : row) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const BigInt& v) { return v == 0; });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw PreconditionError("matrix product: shape mismatch");
  IntMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

BigInt determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw PreconditionError("determinant: matrix not square");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  BigInt sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m(swap_row, k) == 0) ++swap_row;
      if (swap_row == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(swap_row, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

std::size_t rank_over_Q(const IntMatrix& a) {
  IntMatrix m = a;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < m.rows() && m(piv, col) == 0) ++piv;
    if (piv == m.rows()) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(rank, j), m(piv, j));
    for (std::size_t i = rank + 1; i < m.rows(); ++i) {
      if (m(i, col) == 0) continue;
      const BigInt f = m(i, col), p = m(rank, col);
      BigInt g = 0;
      for (std::size_t j = 0; j < m.cols(); ++j) {
        m(i, j) = m(i, j) * p - m(rank, j) * f;
        g = boost::multiprecision::gcd(g, m(i, j));
      }
      if (g > 1)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= g;
    }
    ++rank;
  }
  return rank;
}

std::size_t rank_mod_prime(const IntMatrix& a, u64 ell) {
  std::vector<std::vector<u64>> m(a.rows(), std::vector<u64>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = reduce(a(i, j), ell);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < a.cols() && rank < a.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < a.rows() && m[piv][col] == 0) ++piv;
    if (piv == a.rows()) continue;
    std::swap(m[rank], m[piv]);
    const u64 inv = *inverse_mod(m[rank][col], ell);
    for (std::size_t i = rank + 1; i < a.rows(); ++i) {
      if (m[i][col] == 0) continue;
      const u64 f = mul_mod(m[i][col], inv, ell);
      for (std::size_t j = col; j < a.cols(); ++j)
        m[i][j] = (m[i][j] + ell - mul_mod(f, m[rank][j], ell)) % ell;
    }
    ++rank;
  }
  return rank;
}

namespace {

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}
void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}
// row[dst] += f * row[src]
void add_row(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& f) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) += f * m(src, j);
}
// col[dst] += f * col[src]
void add_col(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& f) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) += f * m(i, src);
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0 || a.is_zero())
    throw PreconditionError("smith_normal_form: zero matrix");
  SmithForm out{a, IntMatrix::identity(a.rows()), IntMatrix::identity(a.cols()), {}};
  IntMatrix& S = out.S;
  IntMatrix& P = out.P;
  IntMatrix& R = out.R;
  const std::size_t n = std::min(a.rows(), a.cols());

  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pi = t, pj = t;
      bool found = false;
      BigInt best;
      for (std::size_t i = t; i < S.rows(); ++i)
        for (std::size_t j = t; j < S.cols(); ++j) {
          if (S(i, j) == 0) continue;
          BigInt mag = abs(S(i, j));
          if (!found || mag < best) {
            best = mag;
            pi = i;
            pj = j;
            found = true;
          }
        }
      if (!found) break;
      swap_rows(S, t, pi);
      swap_rows(P, t, pi);
      swap_cols(S, t, pj);
      swap_cols(R, t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < S.rows(); ++i) {
        if (S(i, t) == 0) continue;
        const BigInt q = S(i, t) / S(t, t);
        add_row(S, i, t, -q);
        add_row(P, i, t, -q);
        if (S(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < S.cols(); ++j) {
        if (S(t, j) == 0) continue;
        const BigInt q = S(t, j) / S(t, t);
        add_col(S, j, t, -q);
        add_col(R, j, t, -q);
        if (S(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Pivot must divide the whole trailing block; otherwise fold the
      // offending row into row t and go again with a smaller pivot.
      bool divides = true;
      for (std::size_t i = t + 1; i < S.rows() && divides; ++i)
        for (std::size_t j = t + 1; j < S.cols(); ++j) {
          if (S(i, j) % S(t, t) != 0) {
            add_row(S, t, i, BigInt(1));
            add_row(P, t, i, BigInt(1));
            divides = false;
            break;
          }
        }
      if (divides) break;
    }
    if (S(t, t) < 0) {
      for (std::size_t j = 0; j < S.cols(); ++j) S(t, j) = -S(t, j);
      for (std::size_t j = 0; j < P.cols(); ++j) P(t, j) = -P(t, j);
    }
  }
  out.diagonal.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.diagonal[i] = S(i, i);
  return out;
}

IntMatrix coefficient_matrix(std::span<const IntPoly> polys, std::size_t rows) {
  for (const auto& p : polys) rows = std::max(rows, p.coeffs().size());
  IntMatrix m(rows, polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i)
    for (std::size_t r = 0; r < polys[i].coeffs().size(); ++r) m(r, i) = polys[i].coeffs()[r];
  return m;
}

bool is_indep_over_Q(std::span<const IntPoly> polys) {
  if (polys.empty()) return true;
  return rank_over_Q(coefficient_matrix(polys)) == polys.size();
}

bool is_indep_mod_ell(std::span<const IntPoly> polys, u64 ell) {
  if (!is_prime(ell)) throw PreconditionError("is_indep_mod_ell: " + std::to_string(ell) + " is not prime");
  if (polys.empty()) return true;
  return rank_mod_prime(coefficient_matrix(polys), ell) == polys.size();
}

std::optional<BigInt> independence_constant(std::span<const IntPoly> polys, std::size_t D) {
  IntMatrix m = coefficient_matrix(polys);
  if (m.rows() == 0 || m.is_zero()) return std::nullopt;
  auto snf = smith_normal_form(m);
  if (snf.diagonal.size() < polys.size() || snf.diagonal.back() == 0) return std::nullopt;
  BigInt bound = std::max(BigInt(D + 1), BigInt(abs(snf.diagonal.back())));
  return bound + 1;
}

PolySystem PolySystem::build(std::vector<IntPoly> polys) {
  if (polys.empty()) throw PreconditionError("build_system: empty system");
  PolySystem sys;
  sys.D_ = 0;
  sys.Dmin_ = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (polys[i].is_constant())
      throw PreconditionError("build_system: G_" + std::to_string(i + 1) + " = " + polys[i].to_string() +
                              " is constant");
    sys.D_ = std::max(sys.D_, *polys[i].degree());
    sys.Dmin_ = std::min(sys.Dmin_, *polys[i].degree());
  }
  sys.polys_ = std::move(polys);

  const auto derivs = sys.derivatives();
  sys.A0_ = coefficient_matrix(derivs, sys.D_);
  for (std::size_t r = 0; r < sys.A0_.rows(); ++r)
    for (std::size_t i = 0; i < sys.A0_.cols(); ++i)
      if (sys.A0_(r, i) % (r + 1) != 0)
        throw InvariantViolation("build_system: (r+1) does not divide a_{i,r}");

  sys.smith_ = smith_normal_form(sys.A0_);
  sys.betas_.assign(sys.M(), BigInt(0));
  for (std::size_t i = 0; i < sys.smith_.diagonal.size() && i < sys.M(); ++i) sys.betas_[i] = sys.smith_.diagonal[i];
  sys.derivs_independent_ = sys.betas_.back() != 0;

  if (sys.derivs_independent_) {
    if (sys.D_ < sys.M()) throw InvariantViolation("build_system: independent derivatives but D < M");
    sys.C0_ = std::max(BigInt(sys.D_ + 1), BigInt(abs(sys.betas_.back()))) + 1;
  }
  return sys;
}

std::vector<IntPoly> PolySystem::derivatives() const {
  std::vector<IntPoly> out;
  out.reserve(polys_.size());
  for (const auto& p : polys_) out.push_back(p.derivative());
  return out;
}

}  // namespace equid
