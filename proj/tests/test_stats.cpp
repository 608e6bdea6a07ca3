#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wrg/stats.hpp"

using namespace wrg;

TEST(Stats, QuantilesInterpolate) {
  const std::vector<double> x{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(stats::median(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 1.0), 4.0);
  EXPECT_THROW(stats::quantile({}, 0.5), Error);
}

TEST(Stats, MeanAndSpread) {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::mean(x), 5.0);
  EXPECT_NEAR(stats::stddev(x), std::sqrt(32.0 / 7), 1e-15);
  EXPECT_NEAR(stats::ci_half_width(x), stats::kZ95 * std::sqrt(32.0 / 7) / std::sqrt(8.0), 1e-15);
  const auto s = stats::summarize(x);
  EXPECT_EQ(s.count, 8u);
  EXPECT_EQ(s.min, 2.0);
  EXPECT_EQ(s.max, 9.0);
  EXPECT_DOUBLE_EQ(s.median, 4.5);
}

TEST(Stats, KolmogorovSmirnov) {
  // Sample {0.5} against U(0,1): sup distance is 0.5 on either side of the jump.
  EXPECT_DOUBLE_EQ(stats::ks_statistic({0.5}, [](double t) { return t; }), 0.5);
  EXPECT_DOUBLE_EQ(stats::ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(stats::ks_two_sample({1, 2}, {3, 4}), 1.0);
}
