#include "equid/numtheory.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "equid/errors.hpp"

namespace equid {

std::string ExtNat::to_string() const {
  return infinite_ ? std::string("inf") : std::to_string(value_);
}

u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::optional<u64> inverse_mod(u64 a, u64 m) {
  if (m == 1) return 0;
  // Extended Euclid on signed 128-bit to avoid overflow for m near 2^64.
  __int128 old_r = static_cast<__int128>(a % m), r = static_cast<__int128>(m);
  __int128 old_s = 1, s = 0;
  while (r != 0) {
    __int128 quot = old_r / r;
    __int128 tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) return std::nullopt;
  __int128 inv = old_s % static_cast<__int128>(m);
  if (inv < 0) inv += m;
  return static_cast<u64>(inv);
}

u64 ipow(u64 base, unsigned exp) {
  u64 result = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && result > std::numeric_limits<u64>::max() / base)
      throw BudgetExceeded("integer power overflows 64 bits");
    result *= base;
  }
  return result;
}

u64 reduce(const BigInt& c, u64 m) {
  BigInt r = c % m;
  if (r < 0) r += m;
  return r.convert_to<u64>();
}

unsigned valuation(BigInt c, u64 ell) {
  if (c == 0) throw PreconditionError("valuation of zero");
  unsigned v = 0;
  while (c % ell == 0) {
    c /= ell;
    ++v;
  }
  return v;
}

unsigned valuation(u64 c, u64 ell) {
  if (c == 0) throw PreconditionError("valuation of zero");
  unsigned v = 0;
  while (c % ell == 0) {
    c /= ell;
    ++v;
  }
  return v;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Bases proven sufficient for n < 2^64.
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    u64 x = pow_mod(a % n, d, n);
    if (a % n == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// IntPoly

IntPoly::IntPoly(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

IntPoly::IntPoly(std::initializer_list<long long> coeffs) {
  coeffs_.reserve(coeffs.size());
  for (long long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

IntPoly IntPoly::constant(BigInt c) { return IntPoly(std::vector<BigInt>{std::move(c)}); }

IntPoly IntPoly::monomial(BigInt c, std::size_t degree) {
  std::vector<BigInt> v(degree + 1);
  v[degree] = std::move(c);
  return IntPoly(std::move(v));
}

IntPoly IntPoly::identity() { return monomial(1, 1); }

void IntPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

BigInt IntPoly::coeff(std::size_t r) const { return r < coeffs_.size() ? coeffs_[r] : BigInt(0); }

std::optional<std::size_t> IntPoly::degree() const {
  if (coeffs_.empty()) return std::nullopt;
  return coeffs_.size() - 1;
}

IntPoly IntPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<BigInt> d(coeffs_.size() - 1);
  for (std::size_t r = 0; r + 1 < coeffs_.size(); ++r) d[r] = coeffs_[r + 1] * (r + 1);
  return IntPoly(std::move(d));
}

ExtNat IntPoly::ord(u64 ell) const {
  if (is_zero()) return ExtNat::infinity();
  unsigned best = std::numeric_limits<unsigned>::max();
  for (const auto& c : coeffs_) {
    if (c != 0) best = std::min(best, valuation(c, ell));
  }
  return ExtNat(best);
}

BigInt IntPoly::eval(const BigInt& v) const {
  BigInt acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * v + *it;
  return acc;
}

u64 IntPoly::eval_mod(u64 v, u64 m) const {
  if (m == 1) return 0;
  auto r = reduce_mod(m);
  return eval_residues(r, v % m, m);
}

std::vector<u64> IntPoly::reduce_mod(u64 m) const {
  std::vector<u64> out(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] = reduce(coeffs_[i], m);
  return out;
}

bool IntPoly::is_constant_mod(u64 m) const {
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    if (reduce(coeffs_[i], m) != 0) return false;
  }
  return true;
}

IntPoly IntPoly::pow(unsigned k) const {
  IntPoly result = IntPoly::constant(1);
  for (unsigned i = 0; i < k; ++i) result = result * *this;
  return result;
}

std::string IntPoly::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    const BigInt& c = coeffs_[i];
    if (c == 0) continue;
    BigInt mag = c < 0 ? BigInt(-c) : c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (i == 0 || mag != 1) os << mag;
    if (i >= 1) os << "T";
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<BigInt> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) + b.coeff(i);
  return IntPoly(std::move(out));
}

IntPoly operator-(const IntPoly& a) {
  std::vector<BigInt> out(a.coeffs_);
  for (auto& c : out) c = -c;
  return IntPoly(std::move(out));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) { return a + (-b); }

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return IntPoly(std::move(out));
}

IntPoly operator*(const BigInt& k, const IntPoly& a) {
  std::vector<BigInt> out(a.coeffs_);
  for (auto& c : out) c *= k;
  return IntPoly(std::move(out));
}

u64 eval_residues(std::span<const u64> coeffs, u64 v, u64 m) {
  u64 acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = add_mod(mul_mod(acc, v, m), *it, m);
  return acc;
}

u64 poly_eval_mod(const IntPoly& p, u64 v, u64 m) {
  if (m == 0) throw PreconditionError("modulus must be >= 1");
  return p.eval_mod(v, m);
}

IntPoly poly_derivative(const IntPoly& p) { return p.derivative(); }

ExtNat poly_ord_ell(const IntPoly& p, u64 ell) { return p.ord(ell); }

IntPoly linear_combination(std::span<const IntPoly> polys, std::span<const BigInt> k) {
  if (polys.size() != k.size()) throw PreconditionError("linear_combination: size mismatch");
  IntPoly acc;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (k[i] != 0) acc = acc + k[i] * polys[i];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Factorization

namespace {

u64 pollard_brent(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 m = 128;
    auto f = [&](u64 v) { return add_mod(mul_mod(v, v, n), c, n); };
    u64 r = 1;
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split_into(u64 n, std::map<u64, unsigned>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  u64 d = pollard_brent(n);
  split_into(d, out);
  split_into(n / d, out);
}

}  // namespace

FactoredModulus::FactoredModulus(u64 q, u64 bound) {
  if (q <= 1) throw PreconditionError("factor: modulus must exceed 1, got " + std::to_string(q));
  if (q > bound) throw PreconditionError("factor: modulus " + std::to_string(q) + " above bound");
  q_ = q;
  std::map<u64, unsigned> found;
  u64 rest = q;
  for (u64 p = 2; p <= 1000 && p * p <= rest; p += (p == 2 ? 1 : 2)) {
    while (rest % p == 0) {
      rest /= p;
      ++found[p];
    }
  }
  split_into(rest, found);
  for (auto [p, e] : found) factors_.push_back({p, e, ipow(p, e)});
}

FactoredModulus FactoredModulus::from_factors(std::vector<PrimePower> factors) {
  if (factors.empty()) throw PreconditionError("from_factors: empty factorization");
  FactoredModulus fm;
  u64 q = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    auto& f = factors[i];
    if (!is_prime(f.prime)) throw PreconditionError("from_factors: " + std::to_string(f.prime) + " is not prime");
    if (f.exponent == 0) throw PreconditionError("from_factors: zero exponent");
    if (i > 0 && factors[i - 1].prime >= f.prime)
      throw PreconditionError("from_factors: primes must be strictly increasing");
    f.value = ipow(f.prime, f.exponent);
    if (q > std::numeric_limits<u64>::max() / f.value) throw PreconditionError("from_factors: overflow");
    q *= f.value;
  }
  fm.q_ = q;
  fm.factors_ = std::move(factors);
  return fm;
}

u64 FactoredModulus::phi() const {
  u64 result = 1;
  for (const auto& f : factors_) result *= f.value / f.prime * (f.prime - 1);
  return result;
}

unsigned FactoredModulus::big_omega() const {
  unsigned s = 0;
  for (const auto& f : factors_) s += f.exponent;
  return s;
}

unsigned FactoredModulus::valuation(u64 ell) const {
  for (const auto& f : factors_)
    if (f.prime == ell) return f.exponent;
  return 0;
}

bool FactoredModulus::is_squarefree() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const PrimePower& f) { return f.exponent == 1; });
}

bool FactoredModulus::is_unit(u64 v) const { return std::gcd(v % q_, q_) == 1; }

u64 FactoredModulus::odd_part() const {
  u64 r = q_;
  while (r % 2 == 0) r /= 2;
  return r;
}

FactoredModulus factor(u64 q, u64 bound) { return FactoredModulus(q, bound); }

u64 euler_phi(u64 n) {
  if (n == 0) throw PreconditionError("euler_phi(0)");
  if (n == 1) return 1;
  return factor(n).phi();
}

Congruence crt_combine(std::span<const Congruence> parts) {
  if (parts.empty()) throw PreconditionError("crt_combine: no congruences");
  Congruence acc{0, 1};
  for (const auto& c : parts) {
    if (c.modulus == 0) throw PreconditionError("crt_combine: zero modulus");
    if (std::gcd(acc.modulus, c.modulus) != 1)
      throw PreconditionError("crt_combine: moduli not pairwise coprime (" + std::to_string(c.modulus) + ")");
    if (acc.modulus > std::numeric_limits<u64>::max() / c.modulus)
      throw PreconditionError("crt_combine: combined modulus overflows");
    const u64 m = acc.modulus * c.modulus;
    const u64 r = c.residue % c.modulus;
    // acc.residue + acc.modulus * t = r (mod c.modulus)
    const u64 inv = *inverse_mod(acc.modulus % c.modulus, c.modulus);
    const u64 diff = (r + c.modulus - acc.residue % c.modulus) % c.modulus;
    const u64 t = mul_mod(diff, inv, c.modulus);
    acc.residue = static_cast<u64>((static_cast<u128>(acc.modulus) * t + acc.residue) % m);
    acc.modulus = m;
  }
  return acc;
}

}  // namespace equid
