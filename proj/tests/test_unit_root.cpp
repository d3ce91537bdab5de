#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridtrend/error.hpp"
#include "gridtrend/series.hpp"
#include "gridtrend/simulator.hpp"
#include "gridtrend/stats.hpp"
#include "gridtrend/unit_root.hpp"

using namespace gridtrend;

namespace {

std::vector<double> random_walk(std::size_t T, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> y(T);
  y[0] = z(rng);
  for (std::size_t t = 1; t < T; ++t) y[t] = y[t - 1] + z(rng);
  return y;
}

std::vector<double> kinked(std::size_t T, std::size_t tb, double slope, double change,
                           double sd, Rng& rng) {
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> y(T);
  for (std::size_t i = 0; i < T; ++i) {
    const double t = static_cast<double>(i + 1);
    y[i] = slope * t + (i + 1 > tb ? change * (t - static_cast<double>(tb)) : 0.0);
    if (sd > 0) y[i] += z(rng);
  }
  return y;
}

// Separate OLS fit at every candidate; earliest minimiser wins.
std::size_t brute_force_break(const std::vector<double>& y, double trimming) {
  const auto w = break_window(y.size(), trimming);
  std::size_t best = w.first;
  double best_ssr = INFINITY;
  for (std::size_t tb = w.first; tb <= w.last; ++tb) {
    const double ssr = ols(y, broken_trend_design(y.size(), tb)).ssr;
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best = tb;
    }
  }
  return best;
}

}  // namespace

TEST(Adf, SizeOnRandomWalk) {
  int rejections = 0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    Rng rng = make_stream(2024, r, 1);
    rejections += adf_test(random_walk(143, rng)).reject;
  }
  const double size = static_cast<double>(rejections) / reps;
  EXPECT_GE(size, 0.035);
  EXPECT_LE(size, 0.065);
}

TEST(Adf, PowerOnTrendStationarySeries) {
  int rejections = 0;
  for (int r = 0; r < 1000; ++r) {
    Rng rng = make_stream(2025, r, 1);
    rejections += adf_test(kinked(143, 0, 0.02, 0.0, 0.1, rng)).reject;
  }
  EXPECT_GE(rejections, 950);
}

TEST(Adf, AffineInvariance) {
  Rng rng = make_stream(1, 0, 0);
  auto y = random_walk(143, rng);
  const auto a = adf_test(y);
  for (auto& v : y) v = 2.5 * v - 7.0;
  const auto b = adf_test(y);
  EXPECT_NEAR(a.t_stat, b.t_stat, 1e-8);
  EXPECT_EQ(a.lags, b.lags);
}

TEST(Adf, DecisionMatchesCriticalValue) {
  for (int r = 0; r < 50; ++r) {
    Rng rng = make_stream(3, r, 0);
    const auto y = r % 2 ? random_walk(100, rng) : kinked(100, 0, 0.01, 0.0, 0.3, rng);
    AdfOptions opt;
    opt.max_lag = 6;
    const auto res = adf_test(y, opt);
    EXPECT_EQ(res.reject, res.t_stat < res.critical_value());
    EXPECT_LE(res.lags, 6);
    EXPECT_GE(res.lags, 0);
    EXPECT_EQ(res.critical_values.size(), 3u);
    // A rejection at 1% implies one at 5% and 10%.
    if (res.t_stat < res.critical_values.at(1.0)) {
      EXPECT_LT(res.t_stat, res.critical_values.at(10.0));
    }
  }
}

TEST(Adf, ErrorsAreTyped) {
  std::vector<double> short_series(10, 0.0);
  for (int i = 0; i < 10; ++i) short_series[i] = i * 0.3 + (i % 3);
  EXPECT_THROW(adf_test(short_series), InputError);
  std::vector<double> flat(100, 1.25);
  EXPECT_THROW(adf_test(flat), DegenerateInputError);
  Rng rng = make_stream(4, 0, 0);
  auto y = random_walk(60, rng);
  AdfOptions opt;
  opt.level = 2.0;
  EXPECT_THROW(adf_test(y, opt), InputError);
}

TEST(Adf, GapNamesTheYear) {
  std::vector<std::optional<double>> v(40);
  for (int i = 0; i < 40; ++i) v[i] = std::sin(i) + 0.1 * i;
  v[12].reset();
  const AnnualSeries s(1900, v);
  try {
    adf_test(s);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("1912"), std::string::npos) << e.what();
  }
}

TEST(BreakDate, NoiselessKinkIsFound) {
  Rng rng = make_stream(0, 0, 0);
  const auto y = kinked(143, 70, 0.01, 0.02, 0.0, rng);
  EXPECT_EQ(estimate_break_date(y).index, 70u);
  EXPECT_EQ(estimate_break_date(y, 0.15, BreakSelector::MaxAbsT).index, 70u);
}

TEST(BreakDate, WindowBounds) {
  const auto w = break_window(143, 0.15);
  EXPECT_EQ(w.first, 22u);
  EXPECT_EQ(w.last, 121u);
  EXPECT_THROW(break_window(143, 0.3), InputError);
  EXPECT_THROW(break_window(5, 0.15), InputError);
}

TEST(BreakDate, MatchesBruteForceOnRandomCorpus) {
  Rng rng = make_stream(606, 0, 0);
  std::uniform_int_distribution<std::size_t> len(20, 60);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int c = 0; c < 200; ++c) {
    const std::size_t T = len(rng);
    std::vector<double> y;
    switch (kind(rng)) {
      case 0: y = random_walk(T, rng); break;
      case 1: y = kinked(T, T / 2, 0.05, 0.1, 1.0, rng); break;
      default: y = kinked(T, 0, 0.0, 0.0, 1.0, rng); break;
    }
    EXPECT_EQ(estimate_break_date(y).index, brute_force_break(y, 0.15)) << "case " << c;
  }
}

TEST(BreakDate, RecoversMidSampleBreakAtTableCalibration) {
  // One series at the mean slope and slope-change of the broken-trend
  // calibration, with noise at the scale of a 1000-grid average.
  const std::size_t T = 150, tb = 75;
  const double sd = 3.0 / std::sqrt(1000.0);
  int hits = 0;
  for (int r = 0; r < 1000; ++r) {
    Rng rng = make_stream(77, r, 0);
    auto y = kinked(T, tb, 0.0110, 0.0271, sd, rng);
    for (std::size_t i = tb; i < T; ++i) y[i] -= 0.5524;
    const auto est = estimate_break_date(y).index;
    hits += (est + 5 >= tb && est <= tb + 5);
  }
  EXPECT_GE(hits, 900);
}

TEST(Kp, SizeOnRandomWalk) {
  int rejections = 0;
  const int reps = 3000;
  for (int r = 0; r < reps; ++r) {
    Rng rng = make_stream(2026, r, 1);
    rejections += kp_test(random_walk(143, rng)).reject;
  }
  EXPECT_LE(static_cast<double>(rejections) / reps, 0.075);
}

TEST(Kp, BreakInsideTrimmedWindow) {
  for (int r = 0; r < 50; ++r) {
    Rng rng = make_stream(5, r, 0);
    const auto y = random_walk(120, rng);
    const auto res = kp_test(y);
    const auto w = break_window(120, 0.15);
    EXPECT_GE(res.break_index, w.first);
    EXPECT_LE(res.break_index, w.last);
    EXPECT_DOUBLE_EQ(res.break_fraction, res.break_index / 120.0);
    EXPECT_EQ(res.reject, res.t_stat < res.critical_value);
  }
}

TEST(Kp, InvariantToDeterministicComponents) {
  Rng rng = make_stream(8, 0, 0);
  auto y = kinked(143, 60, 0.01, 0.03, 0.2, rng);
  const auto a = kp_test(y);
  // Intercept and trend lie in every candidate's design.
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += 3.0 - 0.4 * static_cast<double>(i + 1);
  const auto b = kp_test(y);
  EXPECT_EQ(a.break_index, b.break_index);
  EXPECT_NEAR(a.t_stat, b.t_stat, 1e-8);
  // Detrending at the estimated date absorbs any multiple of its regressors.
  const auto X = broken_trend_design(y.size(), b.break_index);
  const auto before = ols(y, X).residuals;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto r = static_cast<long>(i);
    y[i] += 0.5 * X(r, 1) - 1.0 * X(r, 0) + 0.02 * X(r, 3) + 0.1 * X(r, 2);
  }
  const auto after = ols(y, X).residuals;
  EXPECT_LT((before - after).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Kp, DegenerateAndShortInput) {
  std::vector<double> flat(100, 0.5);
  EXPECT_THROW(kp_test(flat), DegenerateInputError);
  std::vector<double> tiny = {1, 2, 4, 3, 5};
  EXPECT_THROW(kp_test(tiny), InputError);
}
