#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridtrend/series.hpp"

namespace gridtrend {

/// Level (percent) at which decisions are reported.
inline constexpr double kDefaultLevel = 5.0;
inline constexpr double kDefaultTrimming = 0.15;

struct AdfOptions {
  /// Upper bound for the BIC lag search; Schwert's rule when unset.
  std::optional<int> max_lag;
  double level = kDefaultLevel;
};

struct AdfResult {
  double t_stat = 0.0;
  int lags = 0;
  std::size_t nobs = 0;
  /// Keyed by level in percent: 1, 5, 10.
  std::map<double, double> critical_values;
  double level = kDefaultLevel;
  bool reject = false;

  double critical_value() const { return critical_values.at(level); }
};

/// Raw ADF regression outcome without a decision.
struct AdfRegression {
  double t_stat = 0.0;
  int lags = 0;
  std::size_t nobs = 0;
};

/// Lag order by BIC over 0..max_lag, then the regression
///   dy_t = base_t' d + a y_{t-1} + sum c_i dy_{t-i} + e_t
/// re-estimated on every observation available for the chosen order.
/// Returns the t-ratio on a.
AdfRegression adf_regression(std::span<const double> y, const Eigen::MatrixXd& base_design,
                             int max_lag);

/// {1, t} evaluated at t = 1..T.
Eigen::MatrixXd intercept_trend_design(std::size_t T);

/// ADF test with intercept and linear trend. Requires at least 25 values.
AdfResult adf_test(std::span<const double> series, const AdfOptions& options = {});
AdfResult adf_test(const AnnualSeries& series, const AdfOptions& options = {});

/// Finite-sample 1/5/10% critical value of the intercept+trend ADF t-ratio,
/// nobs = observations in the test regression (>= 25).
double adf_critical_value(std::size_t nobs, double level);

enum class BreakSelector {
  /// Minimise the SSR of the static broken-trend regression.
  MinSsr,
  /// Maximise |t| on the slope-change coefficient.
  MaxAbsT,
};

/// Candidate break dates: TB in [first, last] (1-based, regime change after TB).
struct BreakWindow {
  std::size_t first = 0;
  std::size_t last = 0;
};
BreakWindow break_window(std::size_t T, double trimming);

struct BreakDate {
  /// TB, 1-based; the new regime starts at t = TB + 1.
  std::size_t index = 0;
  /// TB / T.
  double fraction = 0.0;
};

/// Columns {1, 1{t>TB}, t, 1{t>TB}(t-TB)} for t = 1..T.
Eigen::MatrixXd broken_trend_design(std::size_t T, std::size_t break_index);

/// SSR of the static broken-trend regression at every candidate of the
/// trimmed window, in order.
std::vector<double> break_ssr_profile(std::span<const double> series, double trimming);

/// Exhaustive search over the trimmed window; ties go to the earliest date.
/// SSRs within 1e-10 of the no-break trend SSR of the minimum count as tied,
/// and among those the smallest |level shift| is preferred first, so an
/// exact kink is dated at the kink rather than one period before it.
BreakDate estimate_break_date(std::span<const double> series,
                              double trimming = kDefaultTrimming,
                              BreakSelector selector = BreakSelector::MinSsr);

struct KpOptions {
  double trimming = kDefaultTrimming;
  std::optional<int> max_lag;
  double level = kDefaultLevel;
  BreakSelector selector = BreakSelector::MinSsr;
};

struct KpResult {
  double t_stat = 0.0;
  std::size_t break_index = 0;
  double break_fraction = 0.0;
  int lags = 0;
  std::size_t nobs = 0;
  double critical_value = 0.0;
  double level = kDefaultLevel;
  bool reject = false;
};

/// The kp_test statistic and break date, without a decision.
struct KpStatistic {
  double t_stat = 0.0;
  BreakDate break_date;
  int lags = 0;
  std::size_t nobs = 0;
};
KpStatistic kp_statistic(std::span<const double> series, const KpOptions& options = {});

/// Unit-root test with one break in intercept and slope at an unknown date
/// (additive-outlier form): estimate TB, detrend on the broken trend at TB,
/// run a no-deterministics ADF regression on the residuals, and compare with
/// the break-fraction dependent critical value.
KpResult kp_test(std::span<const double> series, const KpOptions& options = {});
KpResult kp_test(const AnnualSeries& series, const KpOptions& options = {});

/// Critical value for kp_test at series length T and break fraction lambda.
double kp_critical_value(std::size_t T, double lambda, double level);

}  // namespace gridtrend
