#include "gridtrend/unit_root.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gridtrend/critical_values.hpp"
#include "gridtrend/error.hpp"
#include "gridtrend/stats.hpp"

namespace gridtrend {

namespace {

constexpr std::size_t kMinAdfLength = 25;

void require_variation(std::span<const double> y, const char* what) {
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  if (*mn == *mx) {
    throw DegenerateInputError(std::string(what) + ": series has no variation");
  }
}

struct BreakScan {
  std::vector<double> ssr;
  std::vector<double> abs_t;
  std::vector<double> level_shift;
  /// SSR of the no-break trend regression.
  double trend_ssr = 0.0;
};

// Frisch-Waugh scan: partial {1, t} out once, then each candidate only needs
// the 2x2 Gram matrix of the residualised break regressors (closed forms in
// m = T - TB) and two suffix sums of the residualised series.
BreakScan scan_breaks(std::span<const double> y, BreakWindow w) {
  const std::size_t T = y.size();
  const double n = static_cast<double>(T);
  const double tbar = (n + 1.0) / 2.0;
  const double stt = n * (n * n - 1.0) / 12.0;

  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= n;
  double sty = 0.0;
  for (std::size_t i = 0; i < T; ++i) sty += (static_cast<double>(i + 1) - tbar) * (y[i] - ybar);
  const double slope = sty / stt;

  std::vector<double> r(T);
  double rr = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    r[i] = y[i] - ybar - slope * (static_cast<double>(i + 1) - tbar);
    rr += r[i] * r[i];
  }
  // suffix_r[b] = sum_{t > b} r_t, suffix_tr[b] = sum_{t > b} t r_t (t 1-based).
  std::vector<double> suffix_r(T + 1, 0.0), suffix_tr(T + 1, 0.0);
  for (std::size_t b = T; b-- > 0;) {
    suffix_r[b] = suffix_r[b + 1] + r[b];
    suffix_tr[b] = suffix_tr[b + 1] + static_cast<double>(b + 1) * r[b];
  }

  BreakScan scan;
  scan.trend_ssr = rr;
  const double dof = n - 4.0;
  for (std::size_t tb = w.first; tb <= w.last; ++tb) {
    const double b = static_cast<double>(tb);
    const double m = n - b;
    const double su = m;
    const double ctu = m * (b + 1.0 + n) / 2.0 - m * tbar;
    const double sd = m * (m + 1.0) / 2.0;
    const double sdd = m * (m + 1.0) * (2.0 * m + 1.0) / 6.0;
    const double ctd = b * sd + sdd - tbar * sd;

    const double g11 = su - su * su / n - ctu * ctu / stt;
    const double g12 = sd - su * sd / n - ctu * ctd / stt;
    const double g22 = sdd - sd * sd / n - ctd * ctd / stt;
    const double c1 = suffix_r[tb];
    const double c2 = suffix_tr[tb] - b * suffix_r[tb];

    const double det = g11 * g22 - g12 * g12;
    const double explained = (g22 * c1 * c1 - 2.0 * g12 * c1 * c2 + g11 * c2 * c2) / det;
    const double ssr = std::max(rr - explained, 0.0);
    scan.ssr.push_back(ssr);

    const double gamma2 = (g11 * c2 - g12 * c1) / det;
    scan.level_shift.push_back((g22 * c1 - g12 * c2) / det);
    const double var = (ssr / dof) * (g11 / det);
    scan.abs_t.push_back(var > 0.0 ? std::abs(gamma2) / std::sqrt(var)
                                   : std::numeric_limits<double>::infinity());
  }
  return scan;
}

}  // namespace

Eigen::MatrixXd intercept_trend_design(std::size_t T) {
  Eigen::MatrixXd X(static_cast<long>(T), 2);
  for (std::size_t t = 0; t < T; ++t) {
    X(static_cast<long>(t), 0) = 1.0;
    X(static_cast<long>(t), 1) = static_cast<double>(t + 1);
  }
  return X;
}

AdfRegression adf_regression(std::span<const double> y, const Eigen::MatrixXd& base_design,
                             int max_lag) {
  const int k = select_lags_bic(y, base_design, max_lag);
  const auto T = static_cast<long>(y.size());
  const long p = base_design.cols();
  const long n = T - 1 - k;

  Eigen::MatrixXd X(n, p + 1 + k);
  std::vector<double> dep(static_cast<std::size_t>(n));
  for (long r = 0; r < n; ++r) {
    const long s = k + 1 + r;
    dep[static_cast<std::size_t>(r)] = y[s] - y[s - 1];
    for (long j = 0; j < p; ++j) X(r, j) = base_design(s, j);
    X(r, p) = y[s - 1];
    for (long i = 1; i <= k; ++i) X(r, p + i) = y[s - i] - y[s - i - 1];
  }
  const auto fit = ols(dep, X);
  return {fit.t_stats(p), k, static_cast<std::size_t>(n)};
}

double adf_critical_value(std::size_t nobs, double level) {
  return CriticalValueTable::embedded().adf(nobs, level);
}

AdfResult adf_test(std::span<const double> series, const AdfOptions& options) {
  check_level(options.level);
  if (series.size() < kMinAdfLength) {
    throw InputError("adf_test: series of length " + std::to_string(series.size()) +
                     " is too short; need at least " + std::to_string(kMinAdfLength));
  }
  require_variation(series, "adf_test");
  const int max_lag = options.max_lag.value_or(schwert_max_lag(series.size()));
  const auto reg = adf_regression(series, intercept_trend_design(series.size()), max_lag);

  AdfResult out;
  out.t_stat = reg.t_stat;
  out.lags = reg.lags;
  out.nobs = reg.nobs;
  out.level = options.level;
  for (double level : kSupportedLevels) {
    out.critical_values[level] = adf_critical_value(reg.nobs, level);
  }
  out.reject = out.t_stat < out.critical_value();
  return out;
}

AdfResult adf_test(const AnnualSeries& series, const AdfOptions& options) {
  const auto y = series.dense();
  return adf_test(std::span<const double>(y), options);
}

BreakWindow break_window(std::size_t T, double trimming) {
  if (!(trimming > 0.0 && trimming <= 0.25)) {
    throw InputError("trimming must lie in (0, 0.25]");
  }
  if (T < 10) {
    throw InputError("series of length " + std::to_string(T) +
                     " is too short to fit the five-parameter broken-trend model");
  }
  const double n = static_cast<double>(T);
  BreakWindow w;
  w.first = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(trimming * n - 1e-9)));
  w.last = std::min<std::size_t>(
      T - 2, static_cast<std::size_t>(std::floor((1.0 - trimming) * n + 1e-9)));
  if (w.first > w.last) throw InputError("trimmed break window is empty");
  return w;
}

Eigen::MatrixXd broken_trend_design(std::size_t T, std::size_t break_index) {
  Eigen::MatrixXd X(static_cast<long>(T), 4);
  for (std::size_t i = 0; i < T; ++i) {
    const std::size_t t = i + 1;
    const bool after = t > break_index;
    const auto r = static_cast<long>(i);
    X(r, 0) = 1.0;
    X(r, 1) = after ? 1.0 : 0.0;
    X(r, 2) = static_cast<double>(t);
    X(r, 3) = after ? static_cast<double>(t - break_index) : 0.0;
  }
  return X;
}

std::vector<double> break_ssr_profile(std::span<const double> series, double trimming) {
  return scan_breaks(series, break_window(series.size(), trimming)).ssr;
}

BreakDate estimate_break_date(std::span<const double> series, double trimming,
                              BreakSelector selector) {
  const auto w = break_window(series.size(), trimming);
  const auto scan = scan_breaks(series, w);
  std::size_t best = 0;
  if (selector == BreakSelector::MinSsr) {
    for (std::size_t j = 1; j < scan.ssr.size(); ++j) {
      if (scan.ssr[j] < scan.ssr[best]) best = j;
    }
    // A kink at TB is fitted exactly at TB - 1 as well, with a level shift
    // cancelling the first post-break step. Among numerically equal SSRs take
    // the smallest level shift, then the earliest date.
    const double tol = 1e-10 * scan.trend_ssr;
    const double floor_ssr = scan.ssr[best];
    for (std::size_t j = 0; j < scan.ssr.size(); ++j) {
      if (scan.ssr[j] <= floor_ssr + tol &&
          std::abs(scan.level_shift[j]) < std::abs(scan.level_shift[best]) - 1e-12) {
        best = j;
      }
    }
  } else {
    for (std::size_t j = 1; j < scan.abs_t.size(); ++j) {
      if (scan.abs_t[j] > scan.abs_t[best]) best = j;
    }
  }
  BreakDate out;
  out.index = w.first + best;
  out.fraction = static_cast<double>(out.index) / static_cast<double>(series.size());
  return out;
}

KpStatistic kp_statistic(std::span<const double> series, const KpOptions& options) {
  require_variation(series, "kp_test");
  const auto brk = estimate_break_date(series, options.trimming, options.selector);
  const auto fit = ols(series, broken_trend_design(series.size(), brk.index));
  const int max_lag = options.max_lag.value_or(schwert_max_lag(series.size()));
  const std::vector<double> detrended(fit.residuals.begin(), fit.residuals.end());
  const auto reg = adf_regression(detrended, Eigen::MatrixXd(), max_lag);
  return {reg.t_stat, brk, reg.lags, reg.nobs};
}

double kp_critical_value(std::size_t T, double lambda, double level) {
  return CriticalValueTable::embedded().kp(T, lambda, level);
}

KpResult kp_test(std::span<const double> series, const KpOptions& options) {
  check_level(options.level);
  const auto stat = kp_statistic(series, options);
  KpResult out;
  out.t_stat = stat.t_stat;
  out.break_index = stat.break_date.index;
  out.break_fraction = stat.break_date.fraction;
  out.lags = stat.lags;
  out.nobs = stat.nobs;
  out.level = options.level;
  out.critical_value = kp_critical_value(series.size(), stat.break_date.fraction, options.level);
  out.reject = out.t_stat < out.critical_value;
  return out;
}

KpResult kp_test(const AnnualSeries& series, const KpOptions& options) {
  const auto y = series.dense();
  return kp_test(std::span<const double>(y), options);
}

}  // namespace gridtrend
