#include "equid/vcount.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "equid/errors.hpp"

namespace equid {

namespace {

u64 table_size(u64 q, std::size_t M, u64 limit) {
  u64 size = 1;
  for (std::size_t i = 0; i < M; ++i) {
    if (size > limit / q) throw BudgetExceeded("count table q^M exceeds the budget");
    size *= q;
  }
  return size;
}

void check_mass(u64 phi, unsigned N) {
  u64 mass = 1;
  for (unsigned k = 0; k < N; ++k) {
    if (mass > std::numeric_limits<u64>::max() / phi)
      throw BudgetExceeded("phi(q)^N does not fit in 64 bits");
    mass *= phi;
  }
}

void check_polys(std::span<const IntPoly> polys) {
  if (polys.empty()) throw PreconditionError("count: empty polynomial list");
}

// Nonzero entries of the one-step distribution as (index, multiplicity),
// with each index also decoded into coordinates.
struct Step {
  std::vector<std::vector<u64>> coords;
  std::vector<u64> mult;
};

Step sparse_step(const VDistribution& step) {
  Step s;
  for (std::size_t i = 0; i < step.counts.size(); ++i) {
    if (step.counts[i] == 0) continue;
    s.coords.push_back(step.target(i));
    s.mult.push_back(step.counts[i]);
  }
  return s;
}

VDistribution convolve_power(const VDistribution& step, unsigned N) {
  const u64 q = step.q.value();
  const std::size_t M = step.M;
  const Step s = sparse_step(step);
  VDistribution cur = step;
  std::vector<u64> w(M);
  for (unsigned n = 2; n <= N; ++n) {
    VDistribution next{step.q, M, n, std::vector<u64>(cur.counts.size(), 0)};
    std::fill(w.begin(), w.end(), 0);
    for (std::size_t idx = 0; idx < cur.counts.size(); ++idx) {
      if (idx > 0) {
        // advance the mixed-radix coordinates of idx
        for (std::size_t i = 0; i < M; ++i) {
          if (++w[i] < q) break;
          w[i] = 0;
        }
      }
      const u64 c = cur.counts[idx];
      if (c == 0) continue;
      for (std::size_t k = 0; k < s.mult.size(); ++k) {
        std::size_t target = 0;
        for (std::size_t i = M; i-- > 0;) {
          u64 coord = w[i] + s.coords[k][i];
          if (coord >= q) coord -= q;
          target = target * q + coord;
        }
        next.counts[target] += c * s.mult[k];
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

std::size_t VDistribution::index(std::span<const u64> w) const {
  if (w.size() != M) throw PreconditionError("distribution: target length differs from M");
  const u64 m = q.value();
  std::size_t idx = 0;
  for (std::size_t i = M; i-- > 0;) idx = idx * m + w[i] % m;
  return idx;
}

std::vector<u64> VDistribution::target(std::size_t idx) const {
  std::vector<u64> w(M);
  const u64 m = q.value();
  for (std::size_t i = 0; i < M; ++i) {
    w[i] = idx % m;
    idx /= m;
  }
  return w;
}

u64 VDistribution::total() const { return std::accumulate(counts.begin(), counts.end(), u64{0}); }

VDistribution step_distribution(std::span<const IntPoly> polys, const FactoredModulus& q) {
  check_polys(polys);
  const u64 m = q.value();
  VDistribution d{q, polys.size(), 1, std::vector<u64>(table_size(m, polys.size(), kDefaultCountBudget), 0)};
  std::vector<std::vector<u64>> coeffs;
  for (const auto& p : polys) coeffs.push_back(p.reduce_mod(m));
  for (u64 v = 1; v < m; ++v) {
    if (std::gcd(v, m) != 1) continue;
    std::size_t idx = 0;
    for (std::size_t i = polys.size(); i-- > 0;) idx = idx * m + eval_residues(coeffs[i], v, m);
    ++d.counts[idx];
  }
  return d;
}

VDistribution step_distribution(const PolySystem& system, const FactoredModulus& q) {
  return step_distribution(system.polys(), q);
}

VDistribution distribution_direct(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q, u64 budget) {
  check_polys(polys);
  if (N == 0) throw PreconditionError("count: N must be >= 1");
  const u64 size = table_size(q.value(), polys.size(), budget);
  if (size > budget / N / q.phi()) throw BudgetExceeded("count: N q^M phi(q) exceeds the budget");
  check_mass(q.phi(), N);
  return convolve_power(step_distribution(polys, q), N);
}

VDistribution distribution(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q, u64 budget) {
  check_polys(polys);
  if (N == 0) throw PreconditionError("count: N must be >= 1");
  const std::size_t M = polys.size();
  const u64 m = q.value();
  const u64 size = table_size(m, M, budget);
  check_mass(q.phi(), N);
  if (q.is_prime_power()) return distribution_direct(polys, N, q, budget);

  std::vector<VDistribution> parts;
  for (const auto& f : q.factors()) {
    parts.push_back(distribution_direct(polys, N, FactoredModulus::from_factors({f}), budget));
  }
  VDistribution out{q, M, N, std::vector<u64>(size, 0)};
  std::vector<u64> w(M, 0), local(M);
  for (std::size_t idx = 0; idx < size; ++idx) {
    if (idx > 0)
      for (std::size_t i = 0; i < M; ++i) {
        if (++w[i] < m) break;
        w[i] = 0;
      }
    u64 prod = 1;
    for (const auto& part : parts) {
      const u64 pe = part.q.value();
      for (std::size_t i = 0; i < M; ++i) local[i] = w[i] % pe;
      prod *= part.at(local);
      if (prod == 0) break;
    }
    out.counts[idx] = prod;
  }
  return out;
}

ExactCounter::ExactCounter(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q, u64 budget)
    : M_(polys.size()) {
  check_polys(polys);
  if (N == 0) throw PreconditionError("count: N must be >= 1");
  const u64 size = table_size(q.value(), polys.size(), budget);
  if (size > budget / N / q.phi()) throw BudgetExceeded("count: N q^M phi(q) exceeds the budget");
  check_mass(q.phi(), N);
  for (const auto& f : q.factors())
    parts_.push_back(distribution_direct(polys, N, FactoredModulus::from_factors({f}), budget));
}

u64 ExactCounter::count(std::span<const u64> w) const {
  if (w.size() != M_) throw PreconditionError("count: target length differs from M");
  u64 prod = 1;
  std::vector<u64> local(M_);
  for (const auto& part : parts_) {
    for (std::size_t i = 0; i < M_; ++i) local[i] = w[i] % part.q.value();
    prod *= part.at(local);
    if (prod == 0) break;
  }
  return prod;
}

u64 count_exact(std::span<const IntPoly> polys, unsigned N, const FactoredModulus& q, std::span<const u64> w,
                u64 budget) {
  if (w.size() != polys.size()) throw PreconditionError("count: target length differs from M");
  return ExactCounter(polys, N, q, budget).count(w);
}

u64 count_exact(const PolySystem& system, unsigned N, const FactoredModulus& q, std::span<const u64> w, u64 budget) {
  return count_exact(system.polys(), N, q, w, budget);
}

u64 compute_Q0(const FactoredModulus& q, u64 C, unsigned R) {
  if (C < 2) throw PreconditionError("compute_Q0: C must be >= 2");
  if (R < 2) throw PreconditionError("compute_Q0: R must be >= 2");
  u64 Q0 = 1;
  for (const auto& f : q.factors())
    if (f.prime <= C) Q0 *= ipow(f.prime, std::min(f.exponent, R));
  return Q0;
}

Prop32Report validate_prop32(const PolySystem& system, unsigned N, const FactoredModulus& q, std::span<const u64> w,
                             u64 C, unsigned R, u64 budget) {
  const std::size_t M = system.M(), D = system.D();
  if (N < M * D + 1)
    throw PreconditionError("validate_prop32: need N >= MD+1 = " + std::to_string(M * D + 1));
  Prop32Report rep;
  rep.q = q.value();
  rep.N = N;
  rep.C = C;
  rep.R = R;
  rep.Q0 = compute_Q0(q, C, R);
  rep.count_q = count_exact(system, N, q, w, budget);
  rep.lhs = static_cast<double>(rep.count_q) / std::pow(static_cast<double>(q.phi()), N);
  if (rep.Q0 == 1) {
    rep.count_Q0 = 1;
    rep.main_term = std::pow(1.0 / static_cast<double>(q.value()), static_cast<double>(M));
  } else {
    const FactoredModulus Q0(rep.Q0);
    rep.count_Q0 = count_exact(system, N, Q0, w, budget);
    rep.main_term = std::pow(static_cast<double>(rep.Q0) / static_cast<double>(q.value()), static_cast<double>(M)) *
                    static_cast<double>(rep.count_Q0) / std::pow(static_cast<double>(Q0.phi()), N);
  }
  rep.deviation = rep.main_term > 0 ? std::abs(rep.lhs - rep.main_term) / rep.main_term
                                    : std::numeric_limits<double>::infinity();
  rep.inv_C_pow_N = std::pow(static_cast<double>(C), -static_cast<double>(N));
  double log_prod = 0.0;
  for (const auto& f : q.factors()) {
    if (f.prime <= C) continue;
    const double ell = static_cast<double>(f.prime);
    const double expo = static_cast<double>(N) / static_cast<double>(D) - static_cast<double>(M);
    log_prod += std::log1p(std::pow(2.0 * D, N) / std::pow(ell, expo));
  }
  rep.tail_envelope = std::expm1(log_prod);
  return rep;
}

u64 xi_max(std::span<const IntPoly> polys, const FactoredModulus& q) {
  const auto d = step_distribution(polys, q);
  return *std::max_element(d.counts.begin(), d.counts.end());
}

u64 xi_max(const PolySystem& system, const FactoredModulus& q) { return xi_max(system.polys(), q); }

void write_distribution_csv(const VDistribution& dist, std::ostream& out) {
  out << "#q=" << dist.q.value() << ",M=" << dist.M << ",N=" << dist.N << ",total=" << dist.total() << "\n";
  for (std::size_t i = 1; i <= dist.M; ++i) out << "w_" << i << ",";
  out << "count\n";
  for (std::size_t idx = 0; idx < dist.counts.size(); ++idx) {
    for (u64 c : dist.target(idx)) out << c << ",";
    out << dist.counts[idx] << "\n";
  }
}

}  // namespace equid
