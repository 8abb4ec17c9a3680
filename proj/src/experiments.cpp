#include "equid/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "equid/errors.hpp"

namespace equid {

void require_q_in_log_range(u64 q, u64 x, double K) {
  if (x < 3) throw PreconditionError("experiment: x must be >= 3");
  const double limit = std::pow(std::log(static_cast<double>(x)), K);
  if (static_cast<double>(q) > limit)
    throw PreconditionError("experiment: q = " + std::to_string(q) + " exceeds (log x)^K = " + std::to_string(limit));
}

std::vector<BigInt> nonzero_integer_roots(const IntPoly& G) {
  if (G.is_zero()) throw PreconditionError("nonzero_integer_roots: zero polynomial");
  std::size_t low = 0;
  while (G.coeff(low) == 0) ++low;
  const BigInt c = abs(G.coeff(low));
  if (c > BigInt(std::numeric_limits<std::int64_t>::max()))
    throw BudgetExceeded("nonzero_integer_roots: constant term too large to enumerate divisors");
  const u64 cv = static_cast<u64>(c);
  std::vector<BigInt> roots;
  auto test = [&](u64 d) {
    for (int sign : {1, -1}) {
      const BigInt v = BigInt(d) * sign;
      if (G.eval(v) == 0) roots.push_back(v);
    }
  };
  std::vector<u64> divisors;
  for (u64 d = 1; d * d <= cv; ++d)
    if (cv % d == 0) {
      divisors.push_back(d);
      if (d * d != cv) divisors.push_back(cv / d);
    }
  std::sort(divisors.begin(), divisors.end());
  for (u64 d : divisors) test(d);
  return roots;
}

namespace {

BigInt system_C0(std::vector<IntPoly> polys, const std::string& what) {
  const auto sys = PolySystem::build(std::move(polys));
  if (!sys.C0()) throw PreconditionError(what + ": derivatives are Q-dependent, C0 undefined");
  return *sys.C0();
}

std::vector<AdditiveFunction> strong_family(std::span<const IntPoly> polys) {
  std::vector<AdditiveFunction> gs;
  for (const auto& p : polys) gs.push_back(AdditiveFunction::strong(p));
  return gs;
}

double powd(u64 q, std::size_t M) { return std::pow(static_cast<double>(q), static_cast<double>(M)); }

}  // namespace

Cex41Report run_counterexample_4_1(const IntPoly& G, std::size_t M, u64 q, u64 x, const SieveRange& sieve, double K) {
  if (G.is_constant() || G.coeffs().back() != 1) throw PreconditionError("cex4.1: G must be monic and nonconstant");
  if (M == 0) throw PreconditionError("cex4.1: M must be >= 1");
  const auto roots = nonzero_integer_roots(G);
  if (roots.empty()) throw PreconditionError("cex4.1: G has no nonzero integer root");
  const FactoredModulus Q(q);
  require_q_in_log_range(q, x, K);

  std::vector<IntPoly> polys;
  for (std::size_t i = 1; i <= M; ++i) polys.push_back(G.pow(static_cast<unsigned>(i)));
  Cex41Report rep;
  rep.G = G;
  rep.a = roots.front();
  rep.M = M;
  rep.q = q;
  rep.x = x;
  rep.C0 = system_C0(polys, "cex4.1");
  const BigInt need = std::max(BigInt(abs(rep.a)), rep.C0);
  if (BigInt(Q.smallest_prime()) <= need)
    throw PreconditionError("cex4.1: need P^-(q) > max{|a|, C0} = " + need.str());

  const auto gs = strong_family(polys);
  rep.table = joint_counts(gs, q, sieve, x);
  const std::vector<u64> zero(M, 0);
  rep.count_zero_class = rep.table.at(zero);
  rep.expected = static_cast<double>(x) / powd(q, M);
  rep.ratio = static_cast<double>(rep.count_zero_class) / rep.expected;
  rep.primes_in_class = count_primes_in_class(sieve, x, q, reduce(rep.a, q));
  return rep;
}

Cex61Report run_counterexample_6_1(u64 q, u64 x, const SieveRange& sieve, double K) {
  const FactoredModulus Q(q);
  const std::vector<IntPoly> polys{IntPoly{0, 1}, IntPoly{0, 0, 0, 1}};
  Cex61Report rep;
  rep.q = q;
  rep.x = x;
  rep.C0 = system_C0(polys, "cex6.1");
  if (BigInt(Q.smallest_prime()) <= rep.C0)
    throw PreconditionError("cex6.1: need P^-(q) > C0 = " + rep.C0.str());
  require_q_in_log_range(q, x, K);

  const auto gs = strong_family(polys);
  rep.table = joint_counts(gs, q, sieve, x, Restriction::pk_gt_q(2));
  const std::vector<u64> zero(2, 0);
  rep.count_zero_class = rep.table.at(zero);
  rep.total_restricted = rep.table.total_restricted;
  rep.expected_restricted = static_cast<double>(rep.total_restricted) / powd(q, 2);
  rep.expected_plain = static_cast<double>(x) / powd(q, 2);
  const double lx = std::log(static_cast<double>(x));
  rep.predicted_scale = static_cast<double>(x) * std::log(lx) / (static_cast<double>(q) * lx);
  rep.ratio_restricted = rep.expected_restricted > 0 ? rep.count_zero_class / rep.expected_restricted : 0.0;
  return rep;
}

BigInt thm_1_4_b_M(std::span<const IntPoly> Gs, std::span<const BigInt> a, const IntPoly& G_M, unsigned R,
                   std::span<const BigInt> b) {
  if (Gs.size() != a.size() || Gs.size() != b.size())
    throw PreconditionError("thm1.4: G_1..G_{M-1}, a and b must have the same length");
  BigInt bM = G_M.coeff(0) * R;
  for (std::size_t i = 0; i < Gs.size(); ++i) bM += a[i] * (b[i] - Gs[i].coeff(0) * R);
  return bM;
}

Thm14Report run_thm_1_4(std::span<const IntPoly> Gs, std::span<const BigInt> a, const IntPoly& G_M, unsigned R,
                        u64 q, u64 x, std::span<const BigInt> b, const SieveRange& sieve, double K) {
  if (Gs.empty()) throw PreconditionError("thm1.4: need M >= 2");
  if (Gs.size() != a.size() || Gs.size() != b.size())
    throw PreconditionError("thm1.4: G_1..G_{M-1}, a and b must have the same length");
  if (R == 0) throw PreconditionError("thm1.4: R must be >= 1");
  for (const auto& ai : a)
    if (ai == 0) throw PreconditionError("thm1.4: the a_i must be nonzero");
  if (!is_indep_over_Q([&] {
        std::vector<IntPoly> d;
        for (const auto& g : Gs) d.push_back(g.derivative());
        return d;
      }()))
    throw PreconditionError("thm1.4: G_1'..G_{M-1}' are Q-dependent");

  IntPoly comb_deriv;
  BigInt comb_zero = 0;
  for (std::size_t i = 0; i < Gs.size(); ++i) {
    comb_deriv = comb_deriv + a[i] * Gs[i].derivative();
    comb_zero += a[i] * Gs[i].coeff(0);
  }
  if (G_M.derivative() != comb_deriv)
    throw PreconditionError("thm1.4: G_M' = " + G_M.derivative().to_string() + " differs from sum a_i G_i' = " +
                            comb_deriv.to_string());
  if (G_M.coeff(0) == comb_zero)
    throw PreconditionError("thm1.4: G_M(0) = sum a_i G_i(0) = " + comb_zero.str());

  Thm14Report rep;
  rep.polys.assign(Gs.begin(), Gs.end());
  rep.polys.push_back(G_M);
  rep.a.assign(a.begin(), a.end());
  rep.R = R;
  rep.q = q;
  rep.x = x;

  std::size_t D = 0;
  for (const auto& p : rep.polys) D = std::max(D, *p.degree());
  const auto C1 = independence_constant(rep.polys, D);
  if (!C1) throw PreconditionError("thm1.4: G_1..G_M are Q-dependent");
  const auto sub = PolySystem::build(std::vector<IntPoly>(Gs.begin(), Gs.end()));
  rep.computable_constant = std::max(*C1, *sub.C0());
  rep.R_exceeds_constant = BigInt(R) > rep.computable_constant;
  const FactoredModulus Q(q);
  if (BigInt(Q.smallest_prime()) <= rep.computable_constant)
    throw PreconditionError("thm1.4: need P^-(q) > " + rep.computable_constant.str());
  require_q_in_log_range(q, x, K);

  rep.b_M = thm_1_4_b_M(Gs, a, G_M, R, b);
  for (const auto& bi : b) rep.b.push_back(reduce(bi, q));
  rep.b.push_back(reduce(rep.b_M, q));

  const auto gs = strong_family(rep.polys);
  rep.table = joint_counts(gs, q, sieve, x, Restriction::pk_gt_q(R));
  rep.count = rep.table.at(rep.b);
  rep.total_restricted = rep.table.total_restricted;
  const std::size_t M = rep.polys.size();
  rep.expected_plain = static_cast<double>(x) / powd(q, M);
  const double lx = std::log(static_cast<double>(x));
  rep.predicted_scale =
      static_cast<double>(x) * std::pow(std::log(lx), static_cast<double>(R) - 1.0) / (powd(q, M - 1) * lx);
  rep.ratio_plain = static_cast<double>(rep.count) / rep.expected_plain;
  return rep;
}

RestrictionComparison compare_restriction(std::span<const AdditiveFunction> gs, u64 q, u64 x, unsigned k,
                                          const SieveRange& sieve) {
  RestrictionComparison rep;
  rep.q = q;
  rep.x = x;
  rep.k = k;
  try {
    rep.in_Q = membership_Q(gs, FactoredModulus(q));
  } catch (const BudgetExceeded&) {
    rep.in_Q.reset();
  }
  rep.unrestricted = joint_counts(gs, q, sieve, x);
  rep.restricted = joint_counts(gs, q, sieve, x, Restriction::pk_gt_q(k));
  rep.dev_unrestricted = discrepancy(rep.unrestricted).max_rel_dev;
  if (rep.restricted.total_restricted > 0) rep.dev_restricted = discrepancy(rep.restricted).max_rel_dev;
  return rep;
}

namespace {

PolySystem checked_system(std::span<const AdditiveFunction> gs, const std::string& what) {
  if (gs.empty()) throw PreconditionError(what + ": no functions");
  std::vector<IntPoly> polys;
  for (const auto& g : gs) polys.push_back(g.G());
  auto sys = PolySystem::build(std::move(polys));
  if (!sys.derivatives_independent()) throw PreconditionError(what + ": derivatives are Q-dependent");
  return sys;
}

}  // namespace

RestrictionComparison run_thm_1_2(std::span<const AdditiveFunction> gs, u64 q, u64 x, const SieveRange& sieve) {
  const auto sys = checked_system(gs, "thm1.2");
  if (sys.D() < 2) throw PreconditionError("thm1.2: needs D >= 2");
  return compare_restriction(gs, q, x, static_cast<unsigned>(sys.M() * sys.D() + 1), sieve);
}

RestrictionComparison run_thm_1_3(std::span<const AdditiveFunction> gs, u64 q, u64 x, const SieveRange& sieve) {
  const auto sys = checked_system(gs, "thm1.3");
  if (sys.M() < 2) throw PreconditionError("thm1.3: needs M >= 2");
  if (!FactoredModulus(q).is_squarefree()) throw PreconditionError("thm1.3: q must be squarefree");
  return compare_restriction(gs, q, x, static_cast<unsigned>(2 * sys.M()), sieve);
}

}  // namespace equid
