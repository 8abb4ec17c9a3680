#include "equid/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <exception>
#include <sstream>
#include <thread>

#include "equid/errors.hpp"

namespace equid {

SieveRange build_sieve(u64 x, u64 budget, std::size_t segment_size) {
  if (x > budget) throw BudgetExceeded("sieve: x = " + std::to_string(x) + " exceeds the budget " + std::to_string(budget));
  if (x >= (u64{1} << 32)) throw BudgetExceeded("sieve: x must stay below 2^32");
  if (segment_size == 0) throw PreconditionError("sieve: segment size must be positive");
  SieveRange s;
  s.x = x;
  s.segment_size = segment_size;
  if (x < 2) return s;
  s.spf.assign(x + 1, 0);

  // Base primes up to sqrt(x) by a linear sieve.
  u64 root = static_cast<u64>(std::sqrt(static_cast<double>(x)));
  while (root * root > x) --root;
  while ((root + 1) * (root + 1) <= x) ++root;
  std::vector<std::uint32_t> base_spf(root + 1, 0), primes;
  for (u64 i = 2; i <= root; ++i) {
    if (base_spf[i] == 0) {
      base_spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      if (p > base_spf[i] || i * p > root) break;
      base_spf[i * p] = p;
    }
  }

  // Each segment is marked by the base primes in ascending order, so the first
  // mark on a cell is its least prime factor. Unmarked cells are prime.
  for (u64 lo = 2; lo <= x; lo += segment_size) {
    const u64 hi = std::min<u64>(x + 1, lo + segment_size);
    for (std::uint32_t p : primes) {
      const u64 pp = u64{p} * p;
      if (pp >= hi) break;
      u64 start = std::max(pp, (lo + p - 1) / p * p);
      for (u64 m = start; m < hi; m += p)
        if (s.spf[m] == 0) s.spf[m] = p;
    }
    for (u64 n = lo; n < hi; ++n)
      if (s.spf[n] == 0) s.spf[n] = static_cast<std::uint32_t>(n);
  }
  return s;
}

namespace {

void check_range(u64 n, const SieveRange& sieve) {
  if (n == 0 || n > sieve.x) throw PreconditionError("sieve: n = " + std::to_string(n) + " outside [1, x]");
}

// Prime factors with multiplicity in descending order.
std::vector<u64> descending_primes(u64 n, const SieveRange& sieve) {
  std::vector<u64> out;
  while (n > 1) {
    const u64 p = sieve.spf[n];
    out.push_back(p);
    n /= p;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// g(p^k) mod q from a table of G(r) mod q, r in [0, q).
class ModEvaluator {
 public:
  ModEvaluator(const AdditiveFunction& g, u64 q) : g_(g), q_(q), table_(q) {
    const auto c = g.G().reduce_mod(q);
    for (u64 r = 0; r < q; ++r) table_[r] = eval_residues(c, r, q);
    for (const auto& v : g.two_power_table()) two_.push_back(reduce(v, q));
  }

  u64 operator()(u64 p, unsigned k) const {
    PrimePowerRule rule = g_.rule();
    if (rule == PrimePowerRule::Table) {
      if (p == 2) {
        if (k > two_.size())
          throw PreconditionError("table rule: g(2^" + std::to_string(k) + ") beyond the table");
        return two_[k - 1];
      }
      rule = g_.fallback();
    }
    switch (rule) {
      case PrimePowerRule::Complete: return mul_mod(k % q_, table_[p % q_], q_);
      case PrimePowerRule::Strong: return table_[p % q_];
      case PrimePowerRule::Poly: return table_[pow_mod(p, k, q_)];
      case PrimePowerRule::Table: break;
    }
    throw InvariantViolation("unreachable prime-power rule");
  }

 private:
  const AdditiveFunction& g_;
  u64 q_;
  std::vector<u64> table_;
  std::vector<u64> two_;
};

}  // namespace

std::vector<std::pair<u64, unsigned>> factorize(u64 n, const SieveRange& sieve) {
  check_range(n, sieve);
  std::vector<std::pair<u64, unsigned>> out;
  while (n > 1) {
    const u64 p = sieve.spf[n];
    unsigned k = 0;
    while (n % p == 0) {
      n /= p;
      ++k;
    }
    out.emplace_back(p, k);
  }
  return out;
}

BigInt eval_additive(const AdditiveFunction& g, u64 n, const SieveRange& sieve) {
  BigInt total = 0;
  for (const auto& [p, k] : factorize(n, sieve)) total += g.value_at_prime_power(p, k);
  return total;
}

u64 eval_additive_mod(const AdditiveFunction& g, u64 n, u64 q, const SieveRange& sieve) {
  if (q == 0) throw PreconditionError("eval_additive_mod: zero modulus");
  u64 total = 0;
  for (const auto& [p, k] : factorize(n, sieve)) total = add_mod(total, g.value_at_prime_power_mod(p, k, q), q);
  return total;
}

u64 pk_largest(u64 n, unsigned k, const SieveRange& sieve) {
  check_range(n, sieve);
  if (k == 0) throw PreconditionError("pk_largest: k must be >= 1");
  const auto ps = descending_primes(n, sieve);
  return k <= ps.size() ? ps[k - 1] : 1;
}

unsigned big_omega(u64 n, const SieveRange& sieve) {
  check_range(n, sieve);
  unsigned c = 0;
  while (n > 1) {
    n /= sieve.spf[n];
    ++c;
  }
  return c;
}

unsigned omega_star_gt_q(u64 n, u64 q, const SieveRange& sieve) {
  unsigned total = 0;
  for (const auto& [p, k] : factorize(n, sieve))
    if (p > q && k > 1) total += k;
  return total;
}

// ---------------------------------------------------------------------------

Restriction Restriction::pk_gt_q(unsigned k) {
  if (k == 0) throw PreconditionError("restriction pk: k must be >= 1");
  Restriction r;
  r.kind = Kind::PkGtQ;
  r.k = k;
  return r;
}

Restriction Restriction::convenient(unsigned J, double y) {
  if (!(y >= 1.0)) throw PreconditionError("restriction convenient: y must be >= 1");
  Restriction r;
  r.kind = Kind::Convenient;
  r.J = J;
  r.y = y;
  return r;
}

Restriction Restriction::convenient_for(double x) {
  if (!(x > std::exp(1.0))) return convenient(0, 1.0);
  const double l1 = std::log(x);
  const double l3 = l1 > 1.0 && std::log(l1) > 1.0 ? std::log(std::log(l1)) : 0.0;
  const unsigned J = l3 > 0 ? static_cast<unsigned>(std::floor(l3)) : 0;
  return convenient(J, std::exp(std::sqrt(l1)));
}

bool Restriction::admits(u64 n, u64 q, const SieveRange& sieve) const {
  switch (kind) {
    case Kind::None: return true;
    case Kind::PkGtQ: {
      // P_k(n) > q iff at least k prime factors (with multiplicity) exceed q.
      unsigned big = 0;
      while (n > 1) {
        const u64 p = sieve.spf[n];
        n /= p;
        if (p > q && ++big >= k) return true;
      }
      return false;
    }
    case Kind::Convenient: {
      if (J == 0) return true;
      const auto ps = descending_primes(n, sieve);
      if (ps.size() < J) return false;
      for (unsigned j = 0; j < J; ++j) {
        if (static_cast<double>(ps[j]) <= y) return false;
        if ((j > 0 && ps[j - 1] == ps[j]) || (j + 1 < ps.size() && ps[j + 1] == ps[j])) return false;
      }
      return true;
    }
  }
  return true;
}

std::string Restriction::to_string() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::PkGtQ: return "pk:" + std::to_string(k);
    case Kind::Convenient: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "convenient:%u:%.17g", J, y);
      return buf;
    }
  }
  return "none";
}

Restriction parse_restriction(const std::string& text, double x) {
  if (text.empty() || text == "none") return Restriction::none();
  if (text.rfind("pk:", 0) == 0) {
    const std::string rest = text.substr(3);
    std::size_t used = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) throw PreconditionError("restriction: bad pk spec '" + text + "'");
    return Restriction::pk_gt_q(static_cast<unsigned>(k));
  }
  if (text == "convenient") return Restriction::convenient_for(x);
  if (text.rfind("convenient:", 0) == 0) {
    std::istringstream in(text.substr(11));
    unsigned J = 0;
    char colon = 0;
    double y = 0;
    if (!(in >> J >> colon >> y) || colon != ':') throw PreconditionError("restriction: bad convenient spec '" + text + "'");
    return Restriction::convenient(J, y);
  }
  throw PreconditionError("restriction: expected none, pk:K or convenient, got '" + text + "'");
}

// ---------------------------------------------------------------------------

u64 JointCountTable::at(std::span<const u64> b) const {
  if (b.size() != M) throw PreconditionError("count table: class length differs from M");
  std::size_t idx = 0;
  for (std::size_t i = M; i-- > 0;) idx = idx * q + b[i] % q;
  return counts[idx];
}

std::vector<u64> JointCountTable::cls(std::size_t idx) const {
  std::vector<u64> b(M);
  for (std::size_t i = 0; i < M; ++i) {
    b[i] = idx % q;
    idx /= q;
  }
  return b;
}

namespace {

void count_block(std::span<const ModEvaluator> evals, u64 q, const SieveRange& sieve, u64 lo, u64 hi,
                 const Restriction& restriction, std::vector<u64>& counts, u64& total) {
  const std::size_t M = evals.size();
  std::vector<u64> vals(M);
  for (u64 n = lo; n < hi; ++n) {
    if (!restriction.admits(n, q, sieve)) continue;
    std::fill(vals.begin(), vals.end(), 0);
    u64 m = n;
    while (m > 1) {
      const u64 p = sieve.spf[m];
      unsigned k = 0;
      do {
        m /= p;
        ++k;
      } while (m % p == 0);
      for (std::size_t i = 0; i < M; ++i) vals[i] = add_mod(vals[i], evals[i](p, k), q);
    }
    std::size_t idx = 0;
    for (std::size_t i = M; i-- > 0;) idx = idx * q + vals[i];
    ++counts[idx];
    ++total;
  }
}

}  // namespace

JointCountTable joint_counts(std::span<const AdditiveFunction> gs, u64 q, const SieveRange& sieve, u64 x,
                             const Restriction& restriction, unsigned threads) {
  if (gs.empty()) throw PreconditionError("joint_counts: no functions");
  if (q < 2) throw PreconditionError("joint_counts: q must be >= 2");
  if (x > sieve.x && x > 1) throw PreconditionError("joint_counts: x beyond the sieve range");
  const std::size_t M = gs.size();
  u64 cells = 1;
  for (std::size_t i = 0; i < M; ++i) {
    if (cells > kMaxCountCells / q) throw BudgetExceeded("joint_counts: q^M cells exceed the table cap");
    cells *= q;
  }
  JointCountTable t;
  t.q = q;
  t.M = M;
  t.x = x;
  t.restriction = restriction;
  t.counts.assign(cells, 0);
  if (x == 0) return t;

  std::vector<ModEvaluator> evals;
  evals.reserve(M);
  for (const auto& g : gs) evals.emplace_back(g, q);

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<u64>(x, 64))));
  if (threads == 1) {
    count_block(evals, q, sieve, 1, x + 1, restriction, t.counts, t.total_restricted);
    return t;
  }
  std::vector<std::vector<u64>> tables(threads, std::vector<u64>(cells, 0));
  std::vector<u64> totals(threads, 0);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const u64 block = x / threads + 1;
  for (unsigned w = 0; w < threads; ++w) {
    const u64 lo = 1 + w * block, hi = std::min<u64>(x + 1, lo + block);
    pool.emplace_back([&, w, lo, hi] {
      try {
        if (lo < hi) count_block(evals, q, sieve, lo, hi, restriction, tables[w], totals[w]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (unsigned w = 0; w < threads; ++w) {
    for (std::size_t i = 0; i < cells; ++i) t.counts[i] += tables[w][i];
    t.total_restricted += totals[w];
  }
  return t;
}

DiscrepancyReport discrepancy(const JointCountTable& table) {
  if (table.total_restricted == 0) throw PreconditionError("discrepancy: empty table (no n passes the restriction)");
  DiscrepancyReport r;
  r.q = table.q;
  r.x = table.x;
  r.restriction = table.restriction;
  r.M = table.M;
  r.total = table.total_restricted;
  const double cells = static_cast<double>(table.counts.size());
  const double total = static_cast<double>(table.total_restricted);
  std::size_t best = 0;
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    const double dev = std::abs(static_cast<double>(table.counts[i]) * cells / total - 1.0);
    if (dev > r.max_rel_dev) {
      r.max_rel_dev = dev;
      best = i;
    }
  }
  r.argmax = table.cls(best);
  return r;
}

void write_discrepancy_csv(std::span<const DiscrepancyReport> reports, std::ostream& out) {
  if (reports.empty()) throw PreconditionError("write_discrepancy_csv: no reports");
  const auto& first = reports.front();
  for (const auto& r : reports)
    if (r.x != first.x || r.M != first.M || r.restriction.to_string() != first.restriction.to_string())
      throw PreconditionError("write_discrepancy_csv: reports differ in x, M or restriction");
  out << "#x=" << first.x << ",M=" << first.M << ",restriction=" << first.restriction.to_string() << "\n";
  out << "q,total,max_rel_dev\n";
  char buf[64];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%.17g", r.max_rel_dev);
    out << r.q << "," << r.total << "," << buf << "\n";
  }
}

void write_counts_csv(const JointCountTable& table, std::ostream& out) {
  out << "#x=" << table.x << ",q=" << table.q << ",M=" << table.M << ",restriction=" << table.restriction.to_string()
      << ",total=" << table.total_restricted << "\n";
  for (std::size_t i = 1; i <= table.M; ++i) out << "b_" << i << ",";
  out << "count\n";
  for (std::size_t idx = 0; idx < table.counts.size(); ++idx) {
    for (u64 b : table.cls(idx)) out << b << ",";
    out << table.counts[idx] << "\n";
  }
}

u64 count_primes_in_class(const SieveRange& sieve, u64 x, u64 q, u64 a) {
  if (q == 0) throw PreconditionError("count_primes_in_class: zero modulus");
  if (x > sieve.x && x > 1) throw PreconditionError("count_primes_in_class: x beyond the sieve range");
  const u64 r = a % q;
  u64 c = 0;
  for (u64 p = 2; p <= x; ++p)
    if (sieve.spf[p] == p && p % q == r) ++c;
  return c;
}

}  // namespace equid
