#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "simple/chi_square.hpp"

using namespace simple;

TEST(ChiSquare, ZeroIsOne) {
  for (int df : {1, 2, 3, 7}) EXPECT_EQ(chi2_sf(0.0, df), 1.0);
}

TEST(ChiSquare, TwoDegreesIsExponential) {
  for (double x : {0.01, 0.5, 2.0, 7.3, 30.0, 100.0}) {
    const double expected = std::exp(-x / 2);
    EXPECT_LE(std::abs(chi2_sf(x, 2) - expected), 1e-12 * expected);
  }
  EXPECT_NEAR(chi2_sf(2.0, 2), 0.36787944117144233, 1e-15);
}

TEST(ChiSquare, OneDegreeIsErfc) {
  for (double x : {0.1, 1.0, 3.84, 12.0}) {
    const double expected = std::erfc(std::sqrt(x / 2));
    EXPECT_LE(std::abs(chi2_sf(x, 1) - expected), 1e-12 * expected);
  }
}

TEST(ChiSquare, ThreeDegreesCriticalValue) {
  EXPECT_NEAR(chi2_sf(7.814727903, 3), 0.05, 1e-8);
  EXPECT_NEAR(chi2_upper_quantile(0.05, 3), 7.814727903251178, 1e-8);
  EXPECT_NEAR(chi2_cdf(7.814727903, 3), 0.95, 1e-8);
}

TEST(ChiSquare, StrictlyDecreasing) {
  double prev = 1.0;
  for (double x = 0.25; x < 40; x += 0.25) {
    const double s = chi2_sf(x, 3);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(ChiSquare, QuantileInvertsSurvival) {
  for (int df : {1, 2, 5}) {
    for (double tail : {0.5, 0.05, 1e-4}) {
      EXPECT_NEAR(chi2_sf(chi2_upper_quantile(tail, df), df), tail, 1e-12);
    }
  }
}

TEST(ChiSquare, KolmogorovSmirnov) {
  const std::vector<double> one{1.0};
  const double ks = ks_distance_chi2(one, 3);
  EXPECT_GT(ks, 0.0);
  EXPECT_LE(ks, 1.0);
  std::vector<double> quantiles;
  for (int q = 1; q < 1000; ++q) quantiles.push_back(chi2_upper_quantile(1.0 - q / 1000.0, 2));
  EXPECT_LT(ks_distance_chi2(quantiles, 2), 0.002);
}
