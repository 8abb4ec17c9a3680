// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance [--csv-dir DIR] [--only N[,N...]]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "equid/charsum.hpp"
#include "equid/corpus.hpp"
#include "equid/delange.hpp"
#include "equid/errors.hpp"
#include "equid/experiments.hpp"
#include "equid/polysystem.hpp"
#include "equid/sieve.hpp"
#include "equid/vcount.hpp"

using namespace equid;

namespace {

constexpr u64 kX = 10'000'000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t max_degree(std::span<const IntPoly> polys) {
  std::size_t D = 0;
  for (const auto& p : polys) D = std::max(D, *p.degree());
  return D;
}

// Distinct polynomial lists of the corpus (the A-function and T share one).
std::vector<std::pair<std::string, std::vector<IntPoly>>> corpus_polys() {
  std::vector<std::pair<std::string, std::vector<IntPoly>>> out;
  for (const auto& s : corpus()) {
    const auto p = s.polys();
    bool seen = false;
    for (const auto& [n, q] : out) seen = seen || q == p;
    if (!seen) out.emplace_back(s.name, p);
  }
  return out;
}

// Histogram over (U_q)^N by plain enumeration, indexed like VDistribution.
std::vector<u64> brute_histogram(std::span<const IntPoly> polys, unsigned N, u64 q) {
  const std::size_t M = polys.size();
  std::vector<std::vector<u64>> rows;
  for (u64 v = 1; v < q; ++v) {
    if (std::gcd(v, q) != 1) continue;
    std::vector<u64> row;
    for (const auto& G : polys) {
      BigInt r = G.eval(BigInt(v)) % q;
      if (r < 0) r += q;
      row.push_back(static_cast<u64>(r));
    }
    rows.push_back(row);
  }
  std::size_t cells = 1;
  for (std::size_t i = 0; i < M; ++i) cells *= q;
  std::vector<u64> hist(cells, 0);
  std::vector<std::vector<u64>> acc(N + 1, std::vector<u64>(M, 0));
  auto rec = [&](auto&& self, unsigned depth) -> void {
    if (depth == N) {
      std::size_t idx = 0;
      for (std::size_t i = M; i-- > 0;) idx = idx * q + acc[N][i];
      ++hist[idx];
      return;
    }
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < M; ++i) {
        u64 s = acc[depth][i] + row[i];
        acc[depth + 1][i] = s >= q ? s - q : s;
      }
      self(self, depth + 1);
    }
  };
  rec(rec, 0);
  return hist;
}

Outcome criterion_1() {
  std::size_t checked = 0;
  for (const auto& [name, polys] : corpus_polys()) {
    const std::size_t M = polys.size();
    for (u64 qv = 2; qv <= 30; ++qv) {
      const auto q = factor(qv);
      const OrthogonalityCounter orth(polys, q);
      for (unsigned N = 1; N <= 5; ++N) {
        const auto hist = brute_histogram(polys, N, qv);
        const ExactCounter exact(polys, N, q);
        std::vector<u64> w(M, 0);
        for (std::size_t idx = 0; idx < hist.size(); ++idx) {
          std::size_t rest = idx;
          for (auto& wi : w) {
            wi = rest % qv;
            rest /= qv;
          }
          const u64 a = exact.count(w), b = orth.count(N, w);
          ++checked;
          if (a != hist[idx] || b != hist[idx])
            return {false, fmt("%s q=%llu N=%u: exact %llu, orthogonality %llu, brute %llu", name.c_str(),
                               (unsigned long long)qv, N, (unsigned long long)a, (unsigned long long)b,
                               (unsigned long long)hist[idx])};
        }
      }
    }
  }
  return {true, fmt("%zu targets agree across %zu systems, q<=30, N<=5", checked, corpus_polys().size())};
}

Outcome criterion_2() {
  std::size_t compared = 0;
  for (const auto& spec : corpus()) {
    const std::size_t D = max_degree(spec.polys());
    for (u64 qv = 2; qv <= 30; ++qv) {
      const auto q = factor(qv);
      if (q.smallest_prime() <= D + 1) continue;
      const auto fast = is_jointly_equidistributed(spec.functions, q);
      const auto slow = is_jointly_equidistributed(spec.functions, q, {.force_slow = true});
      ++compared;
      if (fast.equidistributed != slow.equidistributed)
        return {false, fmt("%s q=%llu: %s path says %d, exhaustive says %d", spec.name.c_str(), (unsigned long long)qv,
                           fast.path.c_str(), int(fast.equidistributed), int(slow.equidistributed))};
    }
  }
  return {true, fmt("%zu (system, q) pairs agree", compared)};
}

Outcome criterion_3() {
  std::size_t checked = 0;
  for (const auto& [name, polys] : corpus_polys()) {
    const std::size_t M = polys.size(), D = max_degree(polys);
    for (u64 ell = D + 2; ell <= 50; ++ell) {
      if (!is_prime(ell)) continue;
      bool all_nonzero = true;
      const u64 total = ipow(ell, static_cast<unsigned>(M));
      std::vector<BigInt> k(M);
      for (u64 code = 1; code < total && all_nonzero; ++code) {
        u64 c = code;
        for (auto& ki : k) {
          ki = c % ell;
          c /= ell;
        }
        if (alpha_prime(linear_combination(polys, k), ell) == 0) all_nonzero = false;
      }
      ++checked;
      if (all_nonzero != is_indep_mod_ell(polys, ell))
        return {false, fmt("%s ell=%llu: alpha criterion %d, independence %d", name.c_str(), (unsigned long long)ell,
                           int(all_nonzero), int(!all_nonzero))};
    }
  }
  return {true, fmt("%zu (system, ell) pairs satisfy the biconditional", checked)};
}

Outcome criterion_4() {
  std::size_t tuples = 0;
  double worst = 0.0;
  for (const auto& [name, polys] : corpus_polys()) {
    const std::size_t D = max_degree(polys);
    for (u64 ell = D + 2; ell <= 199; ++ell) {
      if (!is_prime(ell)) continue;
      const auto rep = verify_weil(polys, ell);
      tuples += rep.checked;
      worst = std::max(worst, rep.max_ratio);
      if (!rep.violations.empty())
        return {false, fmt("%s ell=%llu: ratio %.9f", name.c_str(), (unsigned long long)ell, rep.violations[0].ratio)};
    }
  }
  return {worst <= 1 + kBoundTolerance, fmt("%zu sums, max ratio %.6f", tuples, worst)};
}

Outcome criterion_5() {
  std::size_t applicable = 0;
  double worst = 0.0;
  for (const auto& [name, polys] : corpus_polys()) {
    const std::size_t M = polys.size();
    for (u64 ell = 2; ell * ell <= 729; ++ell) {
      if (!is_prime(ell)) continue;
      std::vector<BigInt> k(M);
      const u64 total = ipow(ell, static_cast<unsigned>(M));
      for (unsigned e = 2; ipow(ell, e) <= 729; ++e)
        for (u64 code = 1; code < total; ++code) {
          u64 c = code;
          for (auto& ki : k) {
            ki = c % ell;
            c /= ell;
          }
          const IntPoly F = linear_combination(polys, k);
          if (F.is_constant_mod(ell)) continue;
          const auto rep = verify_cz(F, ell, e);
          if (!rep.applicable) continue;
          ++applicable;
          worst = std::max(worst, rep.ratio);
          if (!rep.holds)
            return {false, fmt("%s F=%s mod %llu^%u: |Z|=%.6f bound %.6f", name.c_str(), F.to_string().c_str(),
                               (unsigned long long)ell, e, rep.abs_Z, rep.bound)};
        }
    }
  }
  return {applicable > 0, fmt("%zu applicable sums, max ratio %.6f", applicable, worst)};
}

Outcome criterion_6() {
  std::mt19937_64 rng(20261019);
  std::uniform_int_distribution<int> coord(-1000, 1000);
  std::size_t checked = 0;
  for (const auto& [name, polys] : corpus_polys()) {
    const auto sys = PolySystem::build(polys);
    for (u64 ell = 2; ell <= 50; ++ell) {
      if (!is_prime(ell)) continue;
      for (int s = 0; s < 1000; ++s) {
        std::vector<BigInt> r(polys.size());
        bool unit = false;
        while (!unit) {
          for (auto& ri : r) {
            ri = coord(rng);
            unit = unit || ri % ell != 0;
          }
        }
        const auto v = invariant_factor_valuation(sys, ell, r);
        ++checked;
        if (!v.holds)
          return {false, fmt("%s ell=%llu: t=%s exceeds %s", name.c_str(), (unsigned long long)ell,
                             v.t.to_string().c_str(), v.bound.to_string().c_str())};
      }
    }
  }
  return {true, fmt("%zu sampled tuples", checked)};
}

struct SieveHolder {
  std::optional<SieveRange> sieve;
  const SieveRange& get() {
    if (!sieve) sieve = build_sieve(kX);
    return *sieve;
  }
};

Outcome criterion_7(SieveHolder& sh, const std::string& csv_dir) {
  const auto& sieve = sh.get();
  const std::vector<AdditiveFunction> gs{AdditiveFunction::complete(IntPoly::identity())};
  std::vector<DiscrepancyReport> reports;
  std::string fails;
  double worst = 0.0;
  for (u64 q = 3; q <= 20; ++q) {
    const auto d = discrepancy(joint_counts(gs, q, sieve, kX));
    reports.push_back(d);
    worst = std::max(worst, d.max_rel_dev);
    if (d.max_rel_dev >= 0.05) fails += fmt(" q=%llu:%.4f", (unsigned long long)q, d.max_rel_dev);
  }
  if (!csv_dir.empty()) {
    std::ofstream f(csv_dir + "/discrepancy_A.csv");
    write_discrepancy_csv(reports, f);
  }
  if (fails.empty()) return {true, fmt("max_rel_dev <= %.4f for all q in 3..20", worst)};
  return {false, "max_rel_dev >= 0.05 at" + fails};
}

Outcome criterion_8(SieveHolder& sh, const std::string& csv_dir) {
  const auto rep = run_counterexample_4_1(IntPoly{-1, 1}, 2, 41, kX, sh.get());
  if (!csv_dir.empty()) {
    std::ofstream f(csv_dir + "/cex41_counts.csv");
    write_counts_csv(rep.table, f);
  }
  const double need = 2.0 * static_cast<double>(kX) / (41.0 * 41.0);
  return {static_cast<double>(rep.count_zero_class) >= need,
          fmt("class (0,0): %llu vs 2x/q^2 = %.1f (ratio to x/q^2 %.2f, pi(x;41,1) = %llu)",
              (unsigned long long)rep.count_zero_class, need, rep.ratio, (unsigned long long)rep.primes_in_class)};
}

Outcome criterion_9(SieveHolder& sh, const std::string& csv_dir) {
  const auto rep = run_counterexample_6_1(11, kX, sh.get());
  if (!csv_dir.empty()) {
    std::ofstream f(csv_dir + "/cex61_counts.csv");
    write_counts_csv(rep.table, f);
  }
  const double need = 1.5 * rep.expected_restricted;
  return {static_cast<double>(rep.count_zero_class) > need,
          fmt("class (0,0): %llu vs 1.5 * restricted/q^2 = %.1f (ratio %.2f)", (unsigned long long)rep.count_zero_class,
              need, rep.ratio_restricted)};
}

Outcome criterion_10(SieveHolder& sh, const std::string& csv_dir) {
  const IntPoly T = IntPoly::identity();
  const std::vector<IntPoly> Gs{T};
  const std::vector<BigInt> a{2}, b{0};
  const auto rep = run_thm_1_4(Gs, a, IntPoly{1, 2}, 3, 29, kX, b, sh.get());
  if (!csv_dir.empty()) {
    std::ofstream f(csv_dir + "/thm14_counts.csv");
    write_counts_csv(rep.table, f);
  }
  const bool formula = rep.b_M == 3;
  const bool over = rep.ratio_plain > 1.5;
  const double vs_restricted = rep.total_restricted
                                   ? static_cast<double>(rep.count) * 29.0 * 29.0 /
                                         static_cast<double>(rep.total_restricted)
                                   : 0.0;
  return {formula && over, fmt("b_M = %s (%s); class (0,%s): %llu vs x/q^2 = %.1f, ratio %.3f (needs > 1.5); "
                               "ratio vs restricted total/q^2 %.2f",
                               rep.b_M.str().c_str(), formula ? "ok" : "wrong", rep.b_M.str().c_str(),
                               (unsigned long long)rep.count, rep.expected_plain, rep.ratio_plain, vs_restricted)};
}

Outcome criterion_11(SieveHolder& sh) {
  const IntPoly T = IntPoly::identity();
  const std::vector<AdditiveFunction> gs{AdditiveFunction::strong(T), AdditiveFunction::strong(T.pow(3))};
  const auto c25 = run_thm_1_2(gs, 25, kX, sh.get());
  const auto c15 = run_thm_1_3(gs, 15, kX, sh.get());
  auto describe = [](const RestrictionComparison& c) {
    const std::string r =
        c.dev_restricted ? fmt("%.4f", *c.dev_restricted) : std::string("undefined (no n passes)");
    return fmt("q=%llu pk:%u restricted %s (n=%llu) vs unrestricted %.4f", (unsigned long long)c.q, c.k, r.c_str(),
               (unsigned long long)c.restricted.total_restricted, c.dev_unrestricted);
  };
  return {c25.restricted_not_worse() && c15.restricted_not_worse(), describe(c25) + "; " + describe(c15)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string csv_dir;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--csv-dir" && i + 1 < argc) {
      csv_dir = argv[++i];
      std::filesystem::create_directories(csv_dir);
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string t; std::getline(ss, t, ',');) only.insert(std::stoi(t));
    } else {
      std::fprintf(stderr, "usage: acceptance [--csv-dir DIR] [--only N[,N...]]\n");
      return 64;
    }
  }

  SieveHolder sh;
  const std::vector<Criterion> criteria{
      {1, "counting: exact = brute force = orthogonality", 300, criterion_1},
      {2, "joint verdict: fast path = exhaustive path", 120, criterion_2},
      {3, "alpha of combinations <=> independence mod ell", 60, criterion_3},
      {4, "Weil bound for prime moduli", 120, criterion_4},
      {5, "prime-power bound", 120, criterion_5},
      {6, "invariant-factor valuation bound", 60, criterion_6},
      {7, "A-function max_rel_dev < 0.05, q = 3..20, x = 1e7", 180, [&] { return criterion_7(sh, csv_dir); }},
      {8, "root counterexample, q = 41: class (0,0) >= 2x/q^2", 180, [&] { return criterion_8(sh, csv_dir); }},
      {9, "(T,T^3) with P_2(n) > 11: class (0,0) > 1.5 restricted/q^2", 180,
       [&] { return criterion_9(sh, csv_dir); }},
      {10, "b_M construction: b_M = 3 and class count > 1.5 x/q^2", 180, [&] { return criterion_10(sh, csv_dir); }},
      {11, "restriction does not worsen max_rel_dev, q = 25 and 15", 300, [&] { return criterion_11(sh); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.time_limit_s) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s limit]", c.time_limit_s);
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s | %s | %s | %.1f s\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
