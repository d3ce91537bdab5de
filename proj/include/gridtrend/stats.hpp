#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gridtrend {

/// Ordinary least squares fit with homoskedastic standard errors.
struct RegressionResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd t_stats;
  Eigen::VectorXd residuals;
  double ssr = 0.0;
  std::size_t nobs = 0;
};

/// Solves min ||y - X b|| by Householder QR.
///
/// Throws InputError on a dimension mismatch or when rows(X) <= cols(X), and
/// SingularMatrixError naming the first column that is (numerically) a linear
/// combination of the preceding ones.
RegressionResult ols(std::span<const double> y, const Eigen::MatrixXd& X);

struct Ar1Estimate {
  double rho = 0.0;
  /// Set when every residual is zero; rho is then reported as 0.
  bool degenerate = false;
};

/// No-intercept OLS slope of e_t on e_{t-1}.
Ar1Estimate fit_ar1(std::span<const double> residuals);

/// floor(12 * (T/100)^(1/4)).
int schwert_max_lag(std::size_t series_length);

/// Number of rows in the common estimation sample used when comparing lag
/// orders 0..max_lag for an ADF-type regression on a series of length T.
inline std::size_t adf_common_sample(std::size_t series_length, int max_lag) {
  return series_length - 1 - static_cast<std::size_t>(max_lag);
}

/// Chooses the number of lagged differences k in
///
///   dy_t = base_t' d + a * y_{t-1} + sum_{i=1..k} c_i dy_{t-i} + e_t
///
/// by minimising BIC(k) = n ln(ssr_k / n) + (p + 1 + k) ln(n), where p is the
/// number of columns of `base_design`. Every candidate is evaluated on the
/// same n = T - 1 - max_lag observations; ties go to the smaller k.
///
/// `base_design` has one row per element of `y` (row t holds the
/// deterministic regressors dated t) or zero columns.
int select_lags_bic(std::span<const double> y, const Eigen::MatrixXd& base_design,
                    int max_lag);

/// BIC values for k = 0..max_lag, on the common sample described above.
std::vector<double> lag_bic_profile(std::span<const double> y,
                                    const Eigen::MatrixXd& base_design, int max_lag);

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;

  /// Trapezoidal integral of the curve over its grid.
  double integral() const;
  /// Trapezoidal first moment over the grid.
  double mean() const;
};

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

/// Value at x of the Gaussian kernel density estimate with bandwidth h.
double kde_at(std::span<const double> samples, double bandwidth, double x);

/// Gaussian kernel density estimate on an evenly spaced grid spanning
/// [min - 3h, max + 3h].
DensityCurve kde(std::span<const double> samples,
                 std::optional<double> bandwidth = std::nullopt,
                 std::size_t points = 512);

}  // namespace gridtrend
