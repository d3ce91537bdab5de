#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridtrend/error.hpp"
#include "gridtrend/simulator.hpp"
#include "gridtrend/stats.hpp"
#include "gridtrend/trend_models.hpp"
#include "gridtrend/unit_root.hpp"

using namespace gridtrend;

namespace {

std::vector<double> noise(std::size_t T, double sd, Rng& rng) {
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> e(T);
  for (auto& v : e) v = z(rng);
  return e;
}

// Two-pass cov(t, y) / var(t).
double two_pass_slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    tm += static_cast<double>(i + 1);
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dt = static_cast<double>(i + 1) - tm;
    sxy += dt * (y[i] - ym);
    sxx += dt * dt;
  }
  return sxy / sxx;
}

}  // namespace

TEST(LinearTrend, NoiselessLine) {
  std::vector<double> y(143);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = -0.7 + 0.011 * static_cast<double>(i + 1);
  const auto fit = fit_linear_trend(y);
  EXPECT_NEAR(fit.beta0, -0.7, 1e-12);
  EXPECT_NEAR(fit.beta1, 0.011, 1e-14);
  EXPECT_EQ(fit.nobs, 143u);
}

TEST(LinearTrend, SlopeMatchesTwoPassOracle) {
  for (int r = 0; r < 50; ++r) {
    Rng rng = make_stream(12, r, 0);
    auto y = noise(30 + 5 * r, 2.0, rng);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.02 * static_cast<double>(i);
    EXPECT_NEAR(fit_linear_trend(y).beta1, two_pass_slope(y), 1e-10);
  }
}

TEST(LinearTrend, RefitOnFittedPlusResiduals) {
  Rng rng = make_stream(13, 0, 0);
  auto y = noise(100, 1.0, rng);
  const auto fit = fit_linear_trend(y);
  std::vector<double> rebuilt(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    rebuilt[i] = fit.beta0 + fit.beta1 * static_cast<double>(i + 1) + fit.residuals[i];
  }
  const auto again = fit_linear_trend(rebuilt);
  EXPECT_NEAR(again.beta0, fit.beta0, 1e-9);
  EXPECT_NEAR(again.beta1, fit.beta1, 1e-9);
}

TEST(LinearTrend, GroupOneCalibrationRecovery) {
  LinearDgpConfig cfg;
  cfg.n1 = 1000;
  cfg.n2 = 0;
  cfg.periods = 143;
  Rng rng = make_stream(14, 0, 0);
  const auto panel = simulate_linear_panel(cfg, rng);
  double mean = 0.0;
  for (std::size_t i = 0; i < panel.rows(); ++i) mean += fit_linear_trend(panel.row(i)).beta1;
  mean /= static_cast<double>(panel.rows());
  EXPECT_NEAR(mean, 0.0108, 0.001);
}

TEST(LinearTrend, TooShortIsInputError) {
  std::vector<double> y = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_THROW(fit_linear_trend(y), InputError);
}

TEST(BrokenTrend, NoiselessKink) {
  std::vector<double> y(143);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    y[i] = 0.2 + 0.01 * t + (t > 70 ? 0.02 * (t - 70) : 0.0);
  }
  const auto fit = fit_broken_trend(y);
  EXPECT_EQ(fit.break_index, 70u);
  EXPECT_NEAR(fit.gamma2, 0.02, 1e-10);
  EXPECT_NEAR(fit.gamma1, 0.01, 1e-10);
  EXPECT_NEAR(fit.alpha1, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(fit.post_break_slope(), fit.gamma1 + fit.gamma2);
  EXPECT_TRUE(fit.has_break);
  EXPECT_TRUE(break_pretest(y).reject);
}

TEST(BrokenTrend, BreakInsideWindowAndSsrBound) {
  for (int r = 0; r < 100; ++r) {
    Rng rng = make_stream(15, r, 0);
    auto y = noise(80, 1.0, rng);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.03 * static_cast<double>(i);
    const auto b = fit_broken_trend(y);
    const auto l = fit_linear_trend(y);
    const auto w = break_window(y.size(), kDefaultTrimming);
    EXPECT_GE(b.break_index, w.first);
    EXPECT_LE(b.break_index, w.last);
    EXPECT_LE(b.ssr, l.ssr + 1e-12);
  }
}

TEST(BrokenTrend, NestsLinearModel) {
  Rng rng = make_stream(16, 0, 0);
  auto y = noise(120, 1.0, rng);
  const auto X = broken_trend_design(y.size(), 60);
  Eigen::MatrixXd restricted(X.rows(), 2);
  restricted.col(0) = X.col(0);
  restricted.col(1) = X.col(2);
  const auto r = ols(y, restricted);
  const auto l = fit_linear_trend(y);
  EXPECT_NEAR(r.coefficients(0), l.beta0, 1e-9);
  EXPECT_NEAR(r.coefficients(1), l.beta1, 1e-9);
}

TEST(BrokenTrend, TooShortIsInputError) {
  std::vector<double> y(19);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(static_cast<double>(i));
  EXPECT_THROW(fit_broken_trend(y), InputError);
}

TEST(BreakPretest, SizeOnLinearTrend) {
  int rejections = 0;
  for (int r = 0; r < 1000; ++r) {
    Rng rng = make_stream(17, r, 0);
    auto y = noise(143, 1.0, rng);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.01 * static_cast<double>(i + 1);
    rejections += fit_broken_trend(y).has_break;
  }
  EXPECT_LE(rejections, 100);
}

TEST(BreakPretest, SizeOnConstantPlusNoise) {
  int rejections = 0;
  for (int r = 0; r < 1000; ++r) {
    Rng rng = make_stream(18, r, 0);
    rejections += break_pretest(noise(143, 1.0, rng)).reject;
  }
  EXPECT_LE(rejections, 100);
}

TEST(BreakPretest, PowerAtBreakCalibration) {
  // Broken-trend laws of the second group, noise at the scale of a
  // 1000-grid average.
  BreakDgpConfig cfg;
  cfg.n1 = 0;
  cfg.n2 = 500;
  cfg.noise.sd = 3.0 / std::sqrt(1000.0);
  Rng rng = make_stream(19, 0, 0);
  const auto panel = simulate_broken_panel(cfg, rng);
  int rejections = 0;
  for (std::size_t i = 0; i < panel.rows(); ++i) rejections += break_pretest(panel.row(i)).reject;
  EXPECT_GE(rejections, 400);
}

TEST(BreakPretest, LowPowerAtGridNoiseScale) {
  // With the grid-level noise sd of 3 the slope change is rarely detectable
  // in a single series.
  BreakDgpConfig cfg;
  cfg.n1 = 0;
  cfg.n2 = 300;
  Rng rng = make_stream(20, 0, 0);
  const auto panel = simulate_broken_panel(cfg, rng);
  int rejections = 0;
  for (std::size_t i = 0; i < panel.rows(); ++i) rejections += break_pretest(panel.row(i)).reject;
  EXPECT_LT(rejections, 150);
}

TEST(BreakPretest, NeweyWestBandwidth) {
  EXPECT_EQ(newey_west_bandwidth(100), 4);
  EXPECT_EQ(newey_west_bandwidth(143), 4);
  EXPECT_EQ(newey_west_bandwidth(50), 3);
}

TEST(SlopeDensity, LaterWindowShiftsRight) {
  Rng rng = make_stream(21, 0, 0);
  std::vector<TrendFit> early, late;
  for (int i = 0; i < 100; ++i) {
    auto a = noise(60, 0.5, rng);
    auto b = noise(60, 0.5, rng);
    for (std::size_t t = 0; t < 60; ++t) {
      a[t] += 0.005 * static_cast<double>(t);
      b[t] += 0.03 * static_cast<double>(t);
    }
    early.push_back(fit_linear_trend(a));
    late.push_back(fit_linear_trend(b));
  }
  EXPECT_GT(slope_density(late).mean(), slope_density(early).mean());
}

TEST(SlopeDensity, RequiresTwoFitsAndMatchingCoefficient) {
  std::vector<TrendFit> one(1);
  EXPECT_THROW(slope_density(one), InputError);
  std::vector<TrendFit> two(2);
  two[1].beta1 = 1.0;
  EXPECT_THROW(slope_density(two, Coefficient::Gamma2), InputError);
  std::vector<TrendFit> same(3);
  EXPECT_THROW(slope_density(same), Error);
}

TEST(SlopeDensity, MeanIdentityUnderWideQuadrature) {
  Rng rng = make_stream(22, 0, 0);
  std::vector<BreakFit> fits;
  std::vector<double> g2;
  for (int i = 0; i < 60; ++i) {
    auto y = noise(100, 0.3, rng);
    for (std::size_t t = 50; t < 100; ++t) y[t] += 0.02 * static_cast<double>(t - 49);
    fits.push_back(fit_broken_trend(y));
    g2.push_back(fits.back().gamma2);
  }
  double mean = 0.0;
  for (double v : g2) mean += v;
  mean /= static_cast<double>(g2.size());
  const auto curve = slope_density(fits, Coefficient::Gamma2);
  const double h = curve.bandwidth;
  const double lo = curve.grid.front() - 10 * h, hi = curve.grid.back() + 10 * h;
  const int n = 40000;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    acc += ((i == 0 || i == n) ? 0.5 : 1.0) * x * kde_at(g2, h, x);
  }
  acc *= (hi - lo) / n;
  EXPECT_NEAR(acc, mean, 1e-6);
}

TEST(TwoGroupSlopes, Examples) {
  auto [pre, post] = two_group_average_slopes(1, 0.01, 1, 0.03);
  EXPECT_DOUBLE_EQ(pre, 0.01);
  EXPECT_DOUBLE_EQ(post, 0.02);
  std::tie(pre, post) = two_group_average_slopes(150, 0.0108, 850, 0.0271);
  EXPECT_DOUBLE_EQ(pre, 0.0108);
  EXPECT_NEAR(post, 0.024655, 1e-12);
  std::tie(pre, post) = two_group_average_slopes(30, 0.02, 70, 0.02);
  EXPECT_NEAR(post, 0.02, 1e-15);
  EXPECT_THROW(two_group_average_slopes(10, 0.01, 0, 0.02), InputError);
}

TEST(Exactness, SlopeOfAverageEqualsAverageOfSlopes) {
  LinearDgpConfig cfg;
  cfg.n1 = 40;
  cfg.n2 = 60;
  cfg.periods = 143;
  Rng rng = make_stream(23, 0, 0);
  const auto panel = simulate_linear_panel(cfg, rng);
  std::vector<double> avg(cfg.periods, 0.0);
  double mean_slope = 0.0;
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    const auto row = panel.row(i);
    for (std::size_t t = 0; t < cfg.periods; ++t) avg[t] += row[t] / 100.0;
    mean_slope += fit_linear_trend(row).beta1 / 100.0;
  }
  EXPECT_NEAR(fit_linear_trend(avg).beta1, mean_slope, 1e-10);
}
