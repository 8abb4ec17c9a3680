#include <random>

#include <gtest/gtest.h>

#include "equid/errors.hpp"
#include "equid/polysystem.hpp"
#include "oracles.hpp"

using namespace equid;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int span) {
  IntMatrix a(r, c);
  std::uniform_int_distribution<int> d(-span, span);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = d(rng);
  return a;
}

BigInt abs_det(const IntMatrix& a) {
  const BigInt d = determinant(a);
  return d < 0 ? BigInt(-d) : d;
}

std::vector<IntPoly> random_polys(std::mt19937_64& rng, std::size_t M, std::size_t maxdeg, int span) {
  std::uniform_int_distribution<int> d(-span, span);
  std::vector<IntPoly> out;
  while (out.size() < M) {
    std::vector<BigInt> c(1 + maxdeg);
    for (auto& x : c) x = d(rng);
    IntPoly p(c);
    if (p.degree().value_or(0) >= 1) out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(Matrix, DeterminantExamples) {
  EXPECT_EQ(determinant(IntMatrix{{1, 2}, {3, 4}}), -2);
  EXPECT_EQ(determinant(IntMatrix{{2, 0, 0}, {0, 3, 0}, {0, 0, 5}}), 30);
  EXPECT_EQ(determinant(IntMatrix{{1, 2}, {2, 4}}), 0);
  EXPECT_EQ(determinant(IntMatrix{{0, 1}, {1, 0}}), -1);
}

TEST(Smith, SpecExamples) {
  const auto s1 = smith_normal_form(IntMatrix{{2, 4}, {6, 8}});
  EXPECT_EQ(s1.diagonal, (std::vector<BigInt>{2, 4}));
  const auto s2 = smith_normal_form(IntMatrix{{1}, {0}, {0}});
  EXPECT_EQ(s2.diagonal, (std::vector<BigInt>{1}));
  const auto s3 = smith_normal_form(IntMatrix{{1, 0}, {0, 2}, {0, 0}});
  EXPECT_EQ(s3.diagonal, (std::vector<BigInt>{1, 2}));
  EXPECT_THROW(smith_normal_form(IntMatrix(2, 2)), PreconditionError);
}

TEST(Smith, ReconstructsAndMatchesDeterminantalDivisors) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 300; ++t) {
    const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    const IntMatrix a = random_matrix(rng, r, c, t % 3 == 0 ? 40 : 6);
    if (a.is_zero()) continue;
    const auto s = smith_normal_form(a);
    EXPECT_EQ(s.P * a * s.R, s.S);
    EXPECT_EQ(abs_det(s.P), 1);
    EXPECT_EQ(abs_det(s.R), 1);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (i != j) EXPECT_EQ(s.S(i, j), 0);
    for (std::size_t i = 0; i < s.diagonal.size(); ++i) {
      EXPECT_GE(s.diagonal[i], 0);
      EXPECT_EQ(s.S(i, i), s.diagonal[i]);
      if (i + 1 < s.diagonal.size() && s.diagonal[i] != 0)
        EXPECT_EQ(s.diagonal[i + 1] % s.diagonal[i], 0);
      if (s.diagonal[i] == 0 && i + 1 < s.diagonal.size()) EXPECT_EQ(s.diagonal[i + 1], 0);
    }
    EXPECT_EQ(s.diagonal, oracle::determinantal_invariants(a));
  }
}

TEST(Rank, AgreesWithRationalElimination) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 4;
    IntMatrix a = random_matrix(rng, r, c, 3);
    if (c >= 2 && t % 4 == 0)
      for (std::size_t i = 0; i < r; ++i) a(i, c - 1) = 2 * a(i, 0) - a(i, 1 % c);
    EXPECT_EQ(rank_over_Q(a), oracle::rational_rank(a));
  }
}

TEST(Independence, Examples) {
  const IntPoly T = IntPoly::identity();
  const std::vector<IntPoly> a{T, T.pow(2)};
  EXPECT_TRUE(is_indep_over_Q(a));
  const std::vector<IntPoly> b{T, IntPoly{0, 2}};
  EXPECT_FALSE(is_indep_over_Q(b));
  const std::vector<IntPoly> c{IntPoly{0, 1, 1}, IntPoly{0, 1, 3}};
  EXPECT_TRUE(is_indep_over_Q(c));
  EXPECT_FALSE(is_indep_mod_ell(c, 2));
  EXPECT_TRUE(is_indep_mod_ell(c, 3));
  EXPECT_THROW(is_indep_mod_ell(c, 4), PreconditionError);
}

TEST(Independence, ModEllAgreesWithExhaustiveSearch) {
  std::mt19937_64 rng(9);
  const u64 primes[] = {2, 3, 5, 7};
  for (int t = 0; t < 200; ++t) {
    const auto polys = random_polys(rng, 1 + rng() % 3, 1 + rng() % 3, 8);
    for (u64 ell : primes) EXPECT_EQ(is_indep_mod_ell(polys, ell), oracle::brute_indep_mod(polys, ell));
  }
}

TEST(PolySystem, SpecSystemT_T3) {
  const IntPoly T = IntPoly::identity();
  const auto sys = PolySystem::build({T, T.pow(3)});
  EXPECT_EQ(sys.M(), 2u);
  EXPECT_EQ(sys.D(), 3u);
  EXPECT_EQ(sys.Dmin(), 1u);
  EXPECT_EQ(std::vector<BigInt>(sys.invariant_factors().begin(), sys.invariant_factors().end()),
            (std::vector<BigInt>{1, 3}));
  EXPECT_TRUE(sys.derivatives_independent());
  ASSERT_TRUE(sys.C0().has_value());
  EXPECT_EQ(*sys.C0(), 5);
  EXPECT_EQ(sys.A0().rows(), 3u);
  EXPECT_EQ(sys.A0().cols(), 2u);
}

TEST(PolySystem, DependentDerivativesHaveNoConstant) {
  const auto sys = PolySystem::build({IntPoly::identity(), IntPoly{1, 2}});
  EXPECT_FALSE(sys.derivatives_independent());
  EXPECT_FALSE(sys.C0().has_value());
  EXPECT_EQ(sys.beta_M(), 0);
}

TEST(PolySystem, RejectsConstants) {
  EXPECT_THROW(PolySystem::build({IntPoly{3}}), PreconditionError);
  EXPECT_THROW(PolySystem::build({}), PreconditionError);
}

TEST(PolySystem, BetaMDivisibilityMatchesIndependenceModEll) {
  std::mt19937_64 rng(13);
  const u64 primes[] = {2, 3, 5, 7, 11, 13};
  for (int t = 0; t < 150; ++t) {
    const auto polys = random_polys(rng, 1 + rng() % 3, 2 + rng() % 3, 9);
    const auto sys = PolySystem::build(polys);
    const auto derivs = sys.derivatives();
    const bool q_indep = oracle::rational_rank(sys.A0()) == sys.M();
    EXPECT_EQ(sys.derivatives_independent(), q_indep);
    for (u64 ell : primes) {
      const bool divides = sys.beta_M() % ell == 0;
      EXPECT_EQ(!divides, is_indep_mod_ell(derivs, ell));
    }
    if (sys.C0()) {
      // Past C0 the derivatives are independent mod every prime.
      for (u64 ell = static_cast<u64>(*sys.C0()); ell < static_cast<u64>(*sys.C0()) + 60; ++ell)
        if (is_prime(ell)) EXPECT_TRUE(is_indep_mod_ell(derivs, ell));
      EXPECT_GT(*sys.C0(), BigInt(sys.D() + 1));
    }
  }
}

TEST(PolySystem, IndependenceConstant) {
  const IntPoly T = IntPoly::identity();
  const std::vector<IntPoly> ps{T, T.pow(2)};
  const auto c = independence_constant(ps, 2);
  ASSERT_TRUE(c.has_value());
  EXPECT_GT(*c, 3);
  const std::vector<IntPoly> dep{T, IntPoly{0, -3}};
  EXPECT_FALSE(independence_constant(dep, 1).has_value());
}
