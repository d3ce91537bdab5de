#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gridtrend/critical_values.hpp"
#include "gridtrend/error.hpp"
#include "gridtrend/simulator.hpp"
#include "gridtrend/stats.hpp"
#include "gridtrend/unit_root.hpp"

using namespace gridtrend;

namespace {

const CriticalValueTable& table() { return CriticalValueTable::embedded(); }

constexpr const char* kToy =
    "# format-version: 1\n"
    "test level lambda nobs value\n"
    "kp 5 0.2 100 -5.0\n"
    "kp 5 0.4 100 -4.0\n"
    "kp 5 0.2 200 -6.0\n"
    "kp 5 0.4 200 -5.0\n"
    "supwald 5 0.15 100 40\n"
    "supwald 5 0.15 200 20\n";

}  // namespace

TEST(CriticalValues, EmbeddedTableLoads) {
  EXPECT_EQ(table().format_version(), "1");
  EXPECT_FALSE(table().rows().empty());
}

TEST(CriticalValues, AdfAnchorAtLengthOneFortyThree) {
  // A series of 143 years with no lags has 142 regression observations.
  EXPECT_NEAR(table().adf(142, 5.0), -3.444, 0.01);
  EXPECT_NEAR(adf_critical_value(142, 5.0), table().adf(142, 5.0), 0.0);
}

TEST(CriticalValues, AdfLargeSampleLimit) {
  EXPECT_NEAR(table().adf(1000000, 5.0), -3.41, 0.02);
  EXPECT_NEAR(table().adf(1000000, 1.0), -3.96, 0.03);
  EXPECT_NEAR(table().adf(1000000, 10.0), -3.13, 0.02);
}

TEST(CriticalValues, LevelsAreOrdered) {
  for (std::size_t n : {25u, 50u, 142u, 500u, 5000u}) {
    EXPECT_LT(table().adf(n, 1.0), table().adf(n, 5.0));
    EXPECT_LT(table().adf(n, 5.0), table().adf(n, 10.0));
  }
  for (double lam : {0.2, 0.5, 0.8}) {
    EXPECT_LT(table().kp(143, lam, 1.0), table().kp(143, lam, 5.0));
    EXPECT_LT(table().kp(143, lam, 5.0), table().kp(143, lam, 10.0));
  }
}

TEST(CriticalValues, UnsupportedLevelListsSupported) {
  try {
    table().adf(100, 2.5);
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1%"), std::string::npos);
    EXPECT_NE(msg.find("5%"), std::string::npos);
    EXPECT_NE(msg.find("10%"), std::string::npos);
  }
  EXPECT_THROW(table().kp(143, 0.5, 2.5), InputError);
}

TEST(CriticalValues, KpInterpolation) {
  const auto t = CriticalValueTable::parse(kToy);
  EXPECT_DOUBLE_EQ(t.kp(100, 0.3, 5.0), -4.5);
  EXPECT_DOUBLE_EQ(t.kp(100, 0.1, 5.0), -5.0);
  EXPECT_DOUBLE_EQ(t.kp(100, 0.9, 5.0), -4.0);
  EXPECT_DOUBLE_EQ(t.kp(50, 0.2, 5.0), -5.0);
  EXPECT_DOUBLE_EQ(t.kp(1000, 0.2, 5.0), -6.0);
  // Linear in 1/T: 1/150 lies a third of the way from 1/200 to 1/100.
  EXPECT_NEAR(t.kp(150, 0.2, 5.0), -6.0 + 1.0 / 3.0, 1e-12);
}

TEST(CriticalValues, SupWaldTrimmingMustBeTabulated) {
  const auto t = CriticalValueTable::parse(kToy);
  EXPECT_DOUBLE_EQ(t.supwald(100, 0.15, 5.0), 40.0);
  EXPECT_THROW(t.supwald(100, 0.10, 5.0), InputError);
}

TEST(CriticalValues, ParseErrorsCarryLineNumbers) {
  try {
    CriticalValueTable::parse("# c\ntest level lambda nobs value\nadf 5 0.3 100 -3.4\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(CriticalValueTable::parse("test level lambda nobs value\nfoo 5 NA 100 1\n"),
               ParseError);
  EXPECT_THROW(CriticalValueTable::parse("a b c\n"), ParseError);
  EXPECT_THROW(CriticalValueTable::parse("test level lambda nobs value\nadf 5 NA 100 x\n"),
               ParseError);
  EXPECT_THROW(CriticalValueTable::parse("# only comments\n"), ParseError);
}

TEST(CriticalValues, MissingFileIsIoError) {
  EXPECT_THROW(CriticalValueTable::load("/nonexistent/cv.tsv"), IoError);
}

TEST(CriticalValues, LargeSampleDickeyFullerCrossCheck) {
  // Direct simulation of the no-lag DF t-ratio at T = 10000.
  const std::size_t T = 10000, reps = 3000;
  std::vector<double> stats;
  Rng rng = make_stream(99, 0, 0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> y(T);
  const auto X = intercept_trend_design(T);
  for (std::size_t r = 0; r < reps; ++r) {
    y[0] = 0.0;
    for (std::size_t t = 1; t < T; ++t) y[t] = y[t - 1] + z(rng);
    stats.push_back(adf_regression(y, X, 0).t_stat);
  }
  std::sort(stats.begin(), stats.end());
  const double q5 = stats[static_cast<std::size_t>(0.05 * reps)];
  EXPECT_NEAR(q5, table().adf(T - 1, 5.0), 0.08);
}
