#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "wrg/rng.hpp"

using namespace wrg;

TEST(Rng, Mix64MatchesSplitMix64ReferenceOutput) {
  // First output of the reference SplitMix64 generator started from state 0.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, DeriveSeedComposesTwoLevels) {
  EXPECT_EQ(derive_seed(7, 3, 5), derive_seed(derive_seed(7, 3), 5));
  EXPECT_EQ(derive_seed(7, 3), mix64(7 ^ mix64(3)));
}

TEST(Rng, DerivedSeedsAreDistinctAcrossGridAndTrial) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t g = 0; g < 50; ++g)
    for (std::uint64_t t = 0; t < 50; ++t) seen.insert(derive_seed(42, g, t));
  EXPECT_EQ(seen.size(), 2500u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(11), b(11), c(12);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformOpenStaysInsideUnitInterval) {
  Rng r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsRoughlyUniform) {
  Rng r(5);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  // Binomial sd is about 90; 5 sd is a safe bound.
  for (int c : counts) EXPECT_NEAR(c, draws / 7, 450);
}
