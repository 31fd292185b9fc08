#include <gtest/gtest.h>

#include <chrono>

#include "icntsch/urt/urt.hpp"
#include "reference.hpp"

using namespace icntsch;
using urt::Rational;

TEST(Urt, ExactPmfMatchesEveryGrowthHistoryUpToEightNodes) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint32_t n = 2; n <= 8; ++n) {
    std::uint64_t h = 0;
    auto counts = reference::enumerate_histories(n, h);
    urt::Pmf<Rational> mix(n, Rational(0));
    for (std::uint32_t k = 1; k <= n; ++k)
      for (std::uint32_t j = 0; j < n; ++j) mix[j] += Rational(counts[k][j], h * n);
    for (std::uint32_t k = 2; k <= n; ++k) {
      auto p = urt::descendants_pmf<Rational>(n, k);
      for (std::uint32_t j = 0; j < n; ++j) EXPECT_EQ(p[j], Rational(counts[k][j], h)) << n << " " << k << " " << j;
    }
    EXPECT_EQ(urt::subtree_size_distribution<Rational>(n, true), mix) << n;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
}

TEST(Urt, SmallCases) {
  EXPECT_EQ(urt::descendants_pmf<Rational>(2, 2), (urt::Pmf<Rational>{1, 0}));
  EXPECT_EQ(urt::descendants_pmf<Rational>(3, 2), (urt::Pmf<Rational>{Rational(1, 2), Rational(1, 2), 0}));
  EXPECT_EQ(urt::subtree_size_distribution<Rational>(2, true), (urt::Pmf<Rational>{Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(urt::subtree_size_distribution<Rational>(3, false),
            (urt::Pmf<Rational>{Rational(3, 4), Rational(1, 4), 0}));
}

TEST(Urt, ExactPmfsSumToOne) {
  for (std::uint32_t n : {2u, 9u, 30u, 60u}) {
    for (std::uint32_t k = 2; k <= n; ++k) EXPECT_EQ(urt::pmf_sum(urt::descendants_pmf<Rational>(n, k)), 1);
    EXPECT_EQ(urt::pmf_sum(urt::subtree_size_distribution<Rational>(n, true)), 1);
    EXPECT_EQ(urt::pmf_sum(urt::subtree_size_distribution<Rational>(n, false)), 1);
  }
  for (std::uint32_t n : {100u, 500u, 2000u})
    EXPECT_NEAR(urt::pmf_sum(urt::subtree_size_distribution<double>(n)), 1.0, 1e-12);
}

TEST(Urt, FloatingRecurrenceAgreesWithExact) {
  const std::uint32_t n = 60;
  for (std::uint32_t k : {2u, 3u, 17u, 59u, 60u}) {
    auto exact = urt::to_double(urt::descendants_pmf<Rational>(n, k));
    auto fast = urt::descendants_pmf<double>(n, k);
    for (std::uint32_t j = 0; j < n; ++j) EXPECT_NEAR(fast[j], exact[j], 1e-14) << k << " " << j;
  }
}

TEST(Urt, MixtureDecaysPastZero) {
  for (std::uint32_t n : {20u, 100u, 500u}) {
    auto p = urt::subtree_size_distribution<double>(n, false);
    for (std::uint32_t j = 1; j + 1 < n; ++j) EXPECT_GE(p[j], p[j + 1]) << n << " " << j;
  }
}

TEST(Urt, SamplerAttachesToEarlierNodes) {
  sim::Rng rng(3);
  auto two = urt::sample_urt(2, rng);
  EXPECT_EQ(two[2], 1u);
  auto p = urt::sample_urt(200, rng);
  for (std::uint32_t i = 2; i <= 200; ++i) {
    EXPECT_GE(p[i], 1u);
    EXPECT_LT(p[i], i);
  }
  auto d = urt::descendant_counts(p);
  EXPECT_EQ(d[1], 199u);
}

TEST(Urt, MonteCarloIsCloseToAnalytic) {
  for (std::uint32_t n : {20u, 50u, 100u, 500u}) {
    const auto t0 = std::chrono::steady_clock::now();
    auto mc = urt::monte_carlo_distribution(n, 10000, 1);
    auto an = urt::subtree_size_distribution<double>(n);
    EXPECT_LT(urt::total_variation(mc, an), 0.02) << n;
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 30.0);
  }
}

TEST(Urt, TailBeyondSevenIsAboutOneInNine) {
  // What the model actually gives, cross-checked by simulation.
  for (std::uint32_t n : {50u, 100u, 500u}) {
    for (bool root : {true, false}) {
      const double an = urt::tail_probability(urt::subtree_size_distribution<double>(n, root), 7);
      const double mc = urt::tail_probability(urt::monte_carlo_distribution(n, 10000, 9, root), 7);
      EXPECT_NEAR(an, mc, 0.01) << n << " " << root;
      EXPECT_GT(an, 0.09);
      EXPECT_LT(an, 0.13);
    }
  }
}

TEST(Urt, RejectsBadArguments) {
  EXPECT_THROW(urt::descendants_pmf<double>(5, 1), std::domain_error);
  EXPECT_THROW(urt::descendants_pmf<double>(5, 6), std::domain_error);
  EXPECT_THROW(urt::descendants_pmf<double>(1, 1), std::domain_error);
  EXPECT_THROW(urt::subtree_size_distribution<double>(1), std::domain_error);
}
