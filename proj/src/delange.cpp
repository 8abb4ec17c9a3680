#include "equid/delange.hpp"

#include <algorithm>
#include <numeric>

#include "equid/errors.hpp"
#include "equid/polysystem.hpp"

namespace equid {

namespace {

// alpha_G(ell) is computed by direct enumeration of F_ell^*.
constexpr u64 kMaxEnumeratedPrime = 100'000'000;

std::uint8_t parity_of(const BigInt& v) { return static_cast<std::uint8_t>(reduce(v, 2)); }

}  // namespace

std::string to_string(PrimePowerRule rule) {
  switch (rule) {
    case PrimePowerRule::Complete: return "complete";
    case PrimePowerRule::Strong: return "strong";
    case PrimePowerRule::Poly: return "poly";
    case PrimePowerRule::Table: return "table";
  }
  return "?";
}

PrimePowerRule parse_rule(const std::string& name) {
  if (name == "complete") return PrimePowerRule::Complete;
  if (name == "strong") return PrimePowerRule::Strong;
  if (name == "poly") return PrimePowerRule::Poly;
  if (name == "table") return PrimePowerRule::Table;
  throw PreconditionError("unknown prime_power_rule '" + name + "'");
}

std::string to_string(Witness::Kind kind) {
  switch (kind) {
    case Witness::Kind::OddPrime: return "odd_prime";
    case Witness::Kind::TwoAdic: return "two_adic";
    case Witness::Kind::Combination: return "combination";
    case Witness::Kind::Dependence: return "dependence";
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::uint8_t ParityProfile::at(std::size_t r) const {
  if (r >= 1 && r <= prefix.size()) return prefix[r - 1];
  return (r % 2 == 1) ? tail_odd_r : tail_even_r;
}

bool ParityProfile::odd_for_all_r() const {
  return std::all_of(prefix.begin(), prefix.end(), [](std::uint8_t b) { return b == 1; }) && tail_odd_r == 1 &&
         tail_even_r == 1;
}

ParityProfile ParityProfile::combine(std::span<const ParityProfile> profiles, std::span<const u64> k) {
  if (profiles.size() != k.size()) throw PreconditionError("ParityProfile::combine: size mismatch");
  ParityProfile out;
  std::size_t len = 0;
  for (const auto& p : profiles) len = std::max(len, p.prefix.size());
  out.prefix.assign(len, 0);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (k[i] % 2 == 0) continue;
    for (std::size_t r = 1; r <= len; ++r) out.prefix[r - 1] ^= profiles[i].at(r);
    out.tail_odd_r ^= profiles[i].tail_odd_r;
    out.tail_even_r ^= profiles[i].tail_even_r;
  }
  return out;
}

// ---------------------------------------------------------------------------

AdditiveFunction::AdditiveFunction(IntPoly G, PrimePowerRule rule) : G_(std::move(G)), rule_(rule) {
  if (G_.is_constant()) throw PreconditionError("additive function: G = " + G_.to_string() + " is constant");
}

AdditiveFunction AdditiveFunction::complete(IntPoly G) { return {std::move(G), PrimePowerRule::Complete}; }
AdditiveFunction AdditiveFunction::strong(IntPoly G) { return {std::move(G), PrimePowerRule::Strong}; }
AdditiveFunction AdditiveFunction::poly(IntPoly G) { return {std::move(G), PrimePowerRule::Poly}; }

AdditiveFunction AdditiveFunction::with_rule(IntPoly G, PrimePowerRule rule) {
  if (rule == PrimePowerRule::Table) throw PreconditionError("table rule needs explicit values");
  return {std::move(G), rule};
}

AdditiveFunction AdditiveFunction::table(IntPoly G, std::vector<BigInt> two_power_values,
                                         std::optional<int> eventual_parity, PrimePowerRule fallback) {
  AdditiveFunction g(std::move(G), PrimePowerRule::Table);
  if (two_power_values.empty()) throw PreconditionError("table rule: no values for g(2^r)");
  if (two_power_values.front() != g.G_.eval(2))
    throw PreconditionError("table rule: g(2) must equal G(2) = " + g.G_.eval(2).str());
  if (fallback == PrimePowerRule::Table) throw PreconditionError("table rule: fallback cannot be a table");
  if (eventual_parity && *eventual_parity != 0 && *eventual_parity != 1)
    throw PreconditionError("table rule: eventual parity must be 0 or 1");
  g.table_ = std::move(two_power_values);
  g.eventual_parity_ = eventual_parity;
  g.fallback_ = fallback;
  return g;
}

BigInt AdditiveFunction::value_at_prime_power(u64 p, unsigned k) const {
  if (k == 0) return 0;
  PrimePowerRule rule = rule_;
  if (rule == PrimePowerRule::Table) {
    if (p == 2) {
      if (k > table_.size())
        throw PreconditionError("table rule: g(2^" + std::to_string(k) + ") beyond the table");
      return table_[k - 1];
    }
    rule = fallback_;
  }
  switch (rule) {
    case PrimePowerRule::Complete: return BigInt(k) * G_.eval(BigInt(p));
    case PrimePowerRule::Strong: return G_.eval(BigInt(p));
    case PrimePowerRule::Poly: return G_.eval(boost::multiprecision::pow(BigInt(p), k));
    case PrimePowerRule::Table: break;
  }
  throw InvariantViolation("unreachable prime-power rule");
}

u64 AdditiveFunction::value_at_prime_power_mod(u64 p, unsigned k, u64 q) const {
  if (k == 0 || q == 1) return 0;
  PrimePowerRule rule = rule_;
  if (rule == PrimePowerRule::Table) {
    if (p == 2) {
      if (k > table_.size())
        throw PreconditionError("table rule: g(2^" + std::to_string(k) + ") beyond the table");
      return reduce(table_[k - 1], q);
    }
    rule = fallback_;
  }
  switch (rule) {
    case PrimePowerRule::Complete: return mul_mod(k % q, G_.eval_mod(p, q), q);
    case PrimePowerRule::Strong: return G_.eval_mod(p, q);
    case PrimePowerRule::Poly: return G_.eval_mod(pow_mod(p, k, q), q);
    case PrimePowerRule::Table: break;
  }
  throw InvariantViolation("unreachable prime-power rule");
}

ParityProfile AdditiveFunction::two_power_parity() const {
  ParityProfile p;
  switch (rule_) {
    case PrimePowerRule::Complete:
      p.tail_odd_r = parity_of(G_.eval(2));
      p.tail_even_r = 0;
      break;
    case PrimePowerRule::Strong:
      p.tail_odd_r = p.tail_even_r = parity_of(G_.eval(2));
      break;
    case PrimePowerRule::Poly:
      // G(2^r) = G(0) mod 2 for every r >= 1.
      p.tail_odd_r = p.tail_even_r = parity_of(G_.coeff(0));
      break;
    case PrimePowerRule::Table:
      if (!eventual_parity_)
        throw PreconditionError("table rule: eventual parity of g(2^r) is undeclared");
      for (const auto& v : table_) p.prefix.push_back(parity_of(v));
      p.tail_odd_r = p.tail_even_r = static_cast<std::uint8_t>(*eventual_parity_);
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------

Rational alpha_prime(const IntPoly& G, u64 ell) {
  if (!is_prime(ell)) throw PreconditionError("alpha_prime: " + std::to_string(ell) + " is not prime");
  if (ell > kMaxEnumeratedPrime) throw BudgetExceeded("alpha: prime " + std::to_string(ell) + " too large to enumerate");
  const auto coeffs = G.reduce_mod(ell);
  u64 good = 0;
  for (u64 v = 1; v < ell; ++v)
    if (eval_residues(coeffs, v, ell) != 0) ++good;
  return Rational(good, ell - 1);
}

Rational alpha(const IntPoly& G, const FactoredModulus& q) {
  Rational acc = 1;
  for (const auto& f : q.factors()) acc *= alpha_prime(G, f.prime);
  return acc;
}

Rational beta_prop(const IntPoly& G, u64 d) {
  if (d <= 1) throw PreconditionError("beta_prop: d must exceed 1");
  if (d > kMaxEnumeratedPrime) throw BudgetExceeded("beta_prop: d too large to enumerate");
  const auto coeffs = G.reduce_mod(d);
  u64 units = 0, good = 0;
  for (u64 r = 1; r < d; ++r) {
    if (std::gcd(r, d) != 1) continue;
    ++units;
    if (eval_residues(coeffs, r, d) != 0) ++good;
  }
  return Rational(good, units);
}

EquidVerdict delange_single_verdict(const IntPoly& G, const ParityProfile& parity, const FactoredModulus& q) {
  EquidVerdict v;
  v.path = "single";
  for (const auto& f : q.factors()) {
    if (f.prime == 2) continue;
    if (beta_prop(G, f.prime) == 0) {
      v.equidistributed = false;
      v.witness = Witness{Witness::Kind::OddPrime, f.prime, {},
                          "S_" + std::to_string(f.prime) + " converges: " + std::to_string(f.prime) +
                              " divides G(p) for every prime p not dividing it"};
      return v;
    }
  }
  const unsigned v2 = q.valuation(2);
  if (v2 == 0) return v;

  const bool s2_diverges = beta_prop(G, 2) != 0;
  const bool all_odd = parity.odd_for_all_r();
  if (!s2_diverges && !all_odd) {
    v.equidistributed = false;
    v.witness = Witness{Witness::Kind::TwoAdic, 2, {}, "S_2 converges and g(2^r) is even for some r >= 1"};
    return v;
  }
  if (v2 >= 2 && beta_prop(G, 4) == 0) {
    v.equidistributed = false;
    v.witness = Witness{Witness::Kind::TwoAdic, 2, {}, "4 | q but S_4 converges"};
    return v;
  }
  return v;
}

EquidVerdict alpha_form_verdict(const IntPoly& G, const ParityProfile& parity, const FactoredModulus& q) {
  if (G.is_constant()) throw PreconditionError("alpha_form_verdict: G must be nonconstant");
  EquidVerdict v;
  v.path = "single";
  auto fail = [&](Witness::Kind kind, u64 prime, std::string reason) {
    v.equidistributed = false;
    v.witness = Witness{kind, prime, {}, std::move(reason)};
    return v;
  };
  auto alpha_zero_at = [&](bool include_two) -> std::optional<u64> {
    for (const auto& f : q.factors()) {
      if (f.prime == 2 && !include_two) continue;
      if (alpha_prime(G, f.prime) == 0) return f.prime;
    }
    return std::nullopt;
  };

  const unsigned v2 = q.valuation(2);
  if (!parity.odd_for_all_r()) {
    if (auto ell = alpha_zero_at(true))
      return fail(*ell == 2 ? Witness::Kind::TwoAdic : Witness::Kind::OddPrime, *ell, "alpha_G vanishes at this prime");
    return v;
  }
  const BigInt g1 = G.eval(1), g3 = G.eval(3);
  const bool four_divides = boost::multiprecision::gcd(g1, g3) % 4 == 0;
  if (four_divides) {
    if (v2 >= 2) return fail(Witness::Kind::TwoAdic, 2, "4 | q while 4 | gcd(G(1), G(3))");
    if (auto ell = alpha_zero_at(false)) return fail(Witness::Kind::OddPrime, *ell, "alpha_G vanishes at this prime");
    return v;
  }
  if (auto ell = alpha_zero_at(false)) return fail(Witness::Kind::OddPrime, *ell, "alpha_G vanishes at this prime");
  return v;
}

EquidVerdict is_equidistributed_single(const AdditiveFunction& g, const FactoredModulus& q) {
  return delange_single_verdict(g.G(), g.two_power_parity(), q);
}

namespace {

struct CombinationInputs {
  std::vector<IntPoly> polys;
  std::vector<ParityProfile> parities;
};

CombinationInputs combination_inputs(std::span<const AdditiveFunction> gs) {
  CombinationInputs in;
  for (const auto& g : gs) {
    in.polys.push_back(g.G());
    in.parities.push_back(g.two_power_parity());
  }
  return in;
}

EquidVerdict combination_verdict_impl(const CombinationInputs& in, std::span<const u64> k, const FactoredModulus& q) {
  std::vector<BigInt> kb(k.begin(), k.end());
  const IntPoly G = linear_combination(in.polys, kb);
  const ParityProfile parity = ParityProfile::combine(in.parities, k);
  return delange_single_verdict(G, parity, q);
}

}  // namespace

EquidVerdict combination_verdict(std::span<const AdditiveFunction> gs, std::span<const u64> k,
                                 const FactoredModulus& q) {
  if (gs.size() != k.size()) throw PreconditionError("combination_verdict: size mismatch");
  return combination_verdict_impl(combination_inputs(gs), k, q);
}

EquidVerdict is_jointly_equidistributed(std::span<const AdditiveFunction> gs, const FactoredModulus& q,
                                        const JointOptions& options) {
  if (gs.empty()) throw PreconditionError("is_jointly_equidistributed: empty family");
  const std::size_t M = gs.size();
  std::size_t D = 0;
  for (const auto& g : gs) D = std::max(D, *g.G().degree());

  if (!options.force_slow && q.smallest_prime() > D + 1) {
    std::vector<IntPoly> polys;
    for (const auto& g : gs) polys.push_back(g.G());
    EquidVerdict v;
    v.path = "fast";
    for (const auto& f : q.factors()) {
      if (!is_indep_mod_ell(polys, f.prime)) {
        v.equidistributed = false;
        v.witness = Witness{Witness::Kind::Dependence, f.prime, {},
                            "G_1..G_M are linearly dependent over F_" + std::to_string(f.prime)};
        return v;
      }
    }
    return v;
  }

  const u64 qv = q.value();
  u64 total = 1;
  for (std::size_t i = 0; i < M; ++i) {
    if (total > options.work_bound / qv)
      throw BudgetExceeded("undecided: q^M = " + std::to_string(qv) + "^" + std::to_string(M) +
                           " tuples exceeds the work bound " + std::to_string(options.work_bound));
    total *= qv;
  }

  const auto inputs = combination_inputs(gs);
  std::vector<u64> units;
  for (u64 u = 1; u < qv; ++u)
    if (std::gcd(u, qv) == 1) units.push_back(u);

  // One representative per orbit of (Z/q)^M under scaling by U_q; tuples
  // sharing a prime with q are never gcd-1 mod q and are skipped.
  std::vector<bool> visited(total, false);
  std::vector<u64> k(M), scaled(M);
  EquidVerdict v;
  v.path = "slow";
  for (u64 code = 1; code < total; ++code) {
    if (visited[code]) continue;
    u64 c = code, g = qv;
    for (std::size_t i = 0; i < M; ++i) {
      k[i] = c % qv;
      c /= qv;
      g = std::gcd(g, k[i]);
    }
    if (g != 1) continue;
    for (u64 u : units) {
      u64 sc = 0;
      for (std::size_t i = M; i-- > 0;) sc = sc * qv + mul_mod(u, k[i], qv);
      visited[sc] = true;
    }
    auto cv = combination_verdict_impl(inputs, k, q);
    if (!cv.equidistributed) {
      v.equidistributed = false;
      Witness w = *cv.witness;
      w.reason = "combination (" + [&] {
        std::string s;
        for (std::size_t i = 0; i < M; ++i) s += (i ? "," : "") + std::to_string(k[i]);
        return s;
      }() + ") fails: " + w.reason;
      w.kind = Witness::Kind::Combination;
      w.combination = k;
      v.witness = std::move(w);
      return v;
    }
  }
  return v;
}

bool membership_Q(std::span<const AdditiveFunction> gs, const FactoredModulus& q, const JointOptions& options) {
  return is_jointly_equidistributed(gs, q, options).equidistributed;
}

}  // namespace equid
