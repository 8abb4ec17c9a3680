#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "equid/errors.hpp"
#include "equid/experiments.hpp"
#include "equid/sieve.hpp"
#include "oracles.hpp"

using namespace equid;

namespace {

const IntPoly T = IntPoly::identity();

const SieveRange& small_sieve() {
  static const SieveRange s = build_sieve(200'000);
  return s;
}

// g(n) from trial division, independent of the sieve.
BigInt slow_additive(const AdditiveFunction& g, u64 n) {
  BigInt s = 0;
  for (const auto& [p, k] : oracle::trial_factor(n)) s += g.value_at_prime_power(p, k);
  return s;
}

std::vector<u64> prime_factors_desc(u64 n) {
  std::vector<u64> out;
  for (const auto& [p, k] : oracle::trial_factor(n))
    for (unsigned i = 0; i < k; ++i) out.push_back(p);
  std::sort(out.rbegin(), out.rend());
  return out;
}

}  // namespace

TEST(Sieve, Examples) {
  const auto s = build_sieve(10);
  const std::vector<std::uint32_t> expect{0, 0, 2, 3, 2, 5, 2, 7, 2, 3, 2};
  EXPECT_EQ(s.spf, expect);
  EXPECT_TRUE(build_sieve(1).spf.size() <= 2);
  EXPECT_THROW(build_sieve(1000, 100), BudgetExceeded);
}

TEST(Sieve, SegmentationDoesNotChangeTable) {
  const auto a = build_sieve(100'000, kDefaultSieveBudget, 1 << 10);
  const auto b = build_sieve(100'000, kDefaultSieveBudget, 1 << 18);
  EXPECT_EQ(a.spf, b.spf);
  for (u64 n = 2; n <= 100'000; ++n) EXPECT_EQ(a.is_prime(n), oracle::slow_is_prime(n));
}

TEST(Additive, Examples) {
  const auto& s = small_sieve();
  EXPECT_EQ(eval_additive(AdditiveFunction::complete(T), 12, s), 7);
  EXPECT_EQ(eval_additive(AdditiveFunction::strong(T), 12, s), 5);
  EXPECT_EQ(eval_additive(AdditiveFunction::strong(T.pow(2) + IntPoly{3}), 1, s), 0);
}

TEST(Additive, AgreesWithTrialDivision) {
  const auto& s = small_sieve();
  const std::vector<AdditiveFunction> gs{
      AdditiveFunction::complete(T), AdditiveFunction::strong(T - IntPoly{1}),
      AdditiveFunction::poly(T.pow(2) + IntPoly{1}),
      AdditiveFunction::table(T + IntPoly{1}, {3, 8, 1}, 0, PrimePowerRule::Complete)};
  for (u64 n = 1; n <= 100'000; ++n)
    for (const auto& g : gs) {
      if (g.rule() == PrimePowerRule::Table && n % 16 == 0) {
        // only the parity of g(2^r) is known past the table
        ASSERT_THROW(eval_additive(g, n, s), PreconditionError);
        continue;
      }
      const BigInt v = slow_additive(g, n);
      ASSERT_EQ(eval_additive(g, n, s), v) << n;
      BigInt r = v % 97;
      if (r < 0) r += 97;
      ASSERT_EQ(eval_additive_mod(g, n, 97, s), static_cast<u64>(r)) << n;
    }
}

TEST(Factorization, Statistics) {
  const auto& s = small_sieve();
  EXPECT_EQ(pk_largest(12, 2, s), 2u);
  EXPECT_EQ(pk_largest(12, 4, s), 1u);
  EXPECT_EQ(pk_largest(1, 1, s), 1u);
  EXPECT_EQ(omega_star_gt_q(49 * 3, 5, s), 2u);
  EXPECT_EQ(omega_star_gt_q(7 * 3, 5, s), 0u);
  EXPECT_EQ(omega_star_gt_q(343 * 121, 5, s), 5u);
  for (u64 n = 1; n <= 50'000; ++n) {
    const auto desc = prime_factors_desc(n);
    EXPECT_EQ(big_omega(n, s), desc.size());
    for (unsigned k = 1; k <= 5; ++k) {
      const u64 expect = k <= desc.size() ? desc[k - 1] : 1;
      ASSERT_EQ(pk_largest(n, k, s), expect) << n << " k=" << k;
      if (k > 1) ASSERT_LE(pk_largest(n, k, s), pk_largest(n, k - 1, s));
    }
  }
}

TEST(Restriction, ParseAndAdmit) {
  const auto& s = small_sieve();
  EXPECT_EQ(parse_restriction("none", 1e5).kind, Restriction::Kind::None);
  const auto pk = parse_restriction("pk:3", 1e5);
  EXPECT_EQ(pk.kind, Restriction::Kind::PkGtQ);
  EXPECT_EQ(pk.k, 3u);
  EXPECT_EQ(pk.to_string(), "pk:3");
  EXPECT_TRUE(pk.admits(7 * 11 * 13, 5, s));
  EXPECT_FALSE(pk.admits(7 * 11 * 3, 5, s));
  const auto conv = parse_restriction("convenient", 1e7);
  EXPECT_EQ(conv.kind, Restriction::Kind::Convenient);
  EXPECT_EQ(conv.J, static_cast<unsigned>(std::floor(std::log(std::log(std::log(1e7))))));
  EXPECT_NEAR(conv.y, std::exp(std::sqrt(std::log(1e7))), 1e-9);
  EXPECT_THROW(parse_restriction("pk:", 1e5), PreconditionError);
  EXPECT_THROW(parse_restriction("sometimes", 1e5), PreconditionError);
}

TEST(Restriction, MonotoneInK) {
  const auto& s = small_sieve();
  const std::vector<AdditiveFunction> gs{AdditiveFunction::complete(T)};
  u64 prev = ~u64{0};
  for (unsigned k = 1; k <= 5; ++k) {
    const auto t = joint_counts(gs, 7, s, 100'000, Restriction::pk_gt_q(k));
    EXPECT_LE(t.total_restricted, prev);
    prev = t.total_restricted;
  }
}

TEST(JointCounts, SmallExamplesAndOracle) {
  const auto& s = small_sieve();
  const std::vector<AdditiveFunction> gs{AdditiveFunction::strong(T), AdditiveFunction::strong(T.pow(3))};
  const auto one = joint_counts(gs, 5, s, 1);
  EXPECT_EQ(one.total_restricted, 1u);
  EXPECT_EQ(one.counts[0], 1u);

  const u64 x = 20'000, q = 6;
  const auto t = joint_counts(gs, q, s, x, Restriction::pk_gt_q(2));
  std::vector<u64> ref(q * q, 0);
  u64 total = 0;
  for (u64 n = 1; n <= x; ++n) {
    const auto desc = prime_factors_desc(n);
    if (!(desc.size() >= 2 && desc[1] > q)) continue;
    ++total;
    BigInt a = slow_additive(gs[0], n) % q, b = slow_additive(gs[1], n) % q;
    ++ref[static_cast<u64>(a) + q * static_cast<u64>(b)];
  }
  EXPECT_EQ(t.counts, ref);
  EXPECT_EQ(t.total_restricted, total);
}

TEST(JointCounts, ThreadCountDoesNotChangeResult) {
  const auto& s = small_sieve();
  const std::vector<AdditiveFunction> gs{AdditiveFunction::complete(T), AdditiveFunction::strong(T.pow(2))};
  const auto a = joint_counts(gs, 9, s, 200'000, {}, 1);
  const auto b = joint_counts(gs, 9, s, 200'000, {}, 4);
  EXPECT_EQ(a.counts, b.counts);
}

TEST(JointCounts, ThreeClassesForTheAFunction) {
  const auto& s = small_sieve();
  const std::vector<AdditiveFunction> gs{AdditiveFunction::complete(T)};
  const auto t = joint_counts(gs, 3, s, 100'000);
  for (u64 c : t.counts) EXPECT_NEAR(static_cast<double>(c), 100'000.0 / 3, 0.05 * 100'000 / 3);
}

TEST(Discrepancy, Examples) {
  JointCountTable uniform{.q = 3, .M = 1, .x = 9, .restriction = {}, .counts = {3, 3, 3}, .total_restricted = 9};
  EXPECT_DOUBLE_EQ(discrepancy(uniform).max_rel_dev, 0.0);
  JointCountTable doubled{.q = 2, .M = 1, .x = 4, .restriction = {}, .counts = {3, 1}, .total_restricted = 4};
  EXPECT_DOUBLE_EQ(discrepancy(doubled).max_rel_dev, 0.5);
  JointCountTable empty{.q = 2, .M = 1, .x = 4, .restriction = {}, .counts = {0, 0}, .total_restricted = 0};
  EXPECT_THROW(discrepancy(empty), PreconditionError);
}

TEST(Csv, CountsFormat) {
  JointCountTable t{.q = 2, .M = 2, .x = 10, .restriction = Restriction::pk_gt_q(2), .counts = {1, 2, 3, 4},
                    .total_restricted = 10};
  std::ostringstream os;
  write_counts_csv(t, os);
  EXPECT_EQ(os.str(), "#x=10,q=2,M=2,restriction=pk:2,total=10\nb_1,b_2,count\n0,0,1\n1,0,2\n0,1,3\n1,1,4\n");
}

TEST(Primes, CountInClass) {
  const auto& s = small_sieve();
  u64 ref = 0;
  for (u64 n = 2; n <= 100'000; ++n)
    if (n % 41 == 1 && oracle::slow_is_prime(n)) ++ref;
  EXPECT_EQ(count_primes_in_class(s, 100'000, 41, 1), ref);
}

TEST(Experiments, Preconditions) {
  const auto& s = small_sieve();
  EXPECT_THROW(run_counterexample_4_1(T - IntPoly{1}, 2, 2, 100'000, s), PreconditionError);
  EXPECT_THROW(run_counterexample_6_1(10, 100'000, s), PreconditionError);
  EXPECT_THROW(require_q_in_log_range(1000, 100'000, 2.0), PreconditionError);
  EXPECT_NO_THROW(require_q_in_log_range(100, 100'000, 2.0));
  EXPECT_EQ(nonzero_integer_roots((T - IntPoly{1}) * (T + IntPoly{3}) * T), (std::vector<BigInt>{1, -3}));
}

TEST(Experiments, SmokeRuns) {
  const auto& s = small_sieve();
  const auto c61 = run_counterexample_6_1(11, 10'000, s);
  EXPECT_EQ(c61.table.counts.size(), 121u);
  const auto c41 = run_counterexample_4_1(T - IntPoly{1}, 2, 11, 100'000, s);
  EXPECT_GE(c41.count_zero_class, c41.primes_in_class);
  EXPECT_EQ(c41.a, 1);
}

TEST(Experiments, Thm14Algebra) {
  const std::vector<IntPoly> Gs{T};
  const std::vector<BigInt> a{2}, b{0};
  EXPECT_EQ(thm_1_4_b_M(Gs, a, IntPoly{1, 2}, 3, b), 3);
  const auto& s = small_sieve();
  EXPECT_THROW(run_thm_1_4(Gs, a, IntPoly{0, 2}, 3, 29, 100'000, b, s), PreconditionError);
  EXPECT_THROW(run_thm_1_4(Gs, a, IntPoly{1, 3}, 3, 29, 100'000, b, s), PreconditionError);
  const auto r = run_thm_1_4(Gs, a, IntPoly{1, 2}, 3, 29, 100'000, b, s);
  EXPECT_EQ(r.b_M, 3);
  EXPECT_EQ(r.b, (std::vector<u64>{0, 3}));
}

TEST(Experiments, RestrictionComparisons) {
  const auto& s = small_sieve();
  const std::vector<AdditiveFunction> gs{AdditiveFunction::strong(T), AdditiveFunction::strong(T.pow(3))};
  const auto c = compare_restriction(gs, 5, 200'000, 4, s);
  EXPECT_EQ(c.unrestricted.total_restricted, 200'000u);
  EXPECT_LT(c.restricted.total_restricted, 200'000u);
  EXPECT_THROW(run_thm_1_3(gs, 12, 200'000, s), PreconditionError);
  const std::vector<AdditiveFunction> lin{AdditiveFunction::strong(T)};
  EXPECT_THROW(run_thm_1_2(lin, 5, 200'000, s), PreconditionError);
}
