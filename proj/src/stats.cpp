#include "gridtrend/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "gridtrend/error.hpp"

namespace gridtrend {

namespace {

constexpr double kRankTolerance = 1e-10;

// Index of the first column whose QR diagonal is negligible relative to the
// column norm, or -1 when the leading `ncols` columns are independent.
long first_dependent_column(const Eigen::MatrixXd& qr_packed, const Eigen::MatrixXd& X,
                            long ncols) {
  for (long j = 0; j < ncols; ++j) {
    const double norm = X.col(j).norm();
    if (norm == 0.0 || std::abs(qr_packed(j, j)) <= kRankTolerance * norm) return j;
  }
  return -1;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

RegressionResult ols(std::span<const double> y, const Eigen::MatrixXd& X) {
  const auto n = static_cast<long>(y.size());
  const long k = X.cols();
  if (X.rows() != n) {
    throw InputError("ols: design has " + std::to_string(X.rows()) + " rows but y has " +
                     std::to_string(n) + " elements");
  }
  if (k == 0) throw InputError("ols: design matrix has no columns");
  if (n <= k) {
    throw InputError("ols: need more observations (" + std::to_string(n) +
                     ") than regressors (" + std::to_string(k) + ")");
  }

  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  if (const long bad = first_dependent_column(packed, X, k); bad >= 0) {
    throw SingularMatrixError(static_cast<std::size_t>(bad),
                              "ols: design matrix is rank deficient at column " +
                                  std::to_string(bad));
  }

  const auto R = packed.topRows(k).triangularView<Eigen::Upper>();
  const Eigen::VectorXd qty = qr.householderQ().adjoint() * yv;

  RegressionResult out;
  out.nobs = static_cast<std::size_t>(n);
  out.coefficients = R.solve(qty.head(k));
  out.residuals = yv - X * out.coefficients;
  out.ssr = out.residuals.squaredNorm();

  const double s2 = out.ssr / static_cast<double>(n - k);
  const Eigen::MatrixXd rinv = R.solve(Eigen::MatrixXd::Identity(k, k));
  out.standard_errors = (rinv.rowwise().squaredNorm() * s2).cwiseSqrt();
  out.t_stats = out.coefficients.cwiseQuotient(out.standard_errors);
  return out;
}

Ar1Estimate fit_ar1(std::span<const double> e) {
  if (e.size() < 3) throw InputError("fit_ar1: need at least 3 residuals");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 1; t < e.size(); ++t) {
    num += e[t] * e[t - 1];
    den += e[t - 1] * e[t - 1];
  }
  if (den == 0.0) return {0.0, true};
  return {num / den, false};
}

int schwert_max_lag(std::size_t series_length) {
  return static_cast<int>(
      std::floor(12.0 * std::pow(static_cast<double>(series_length) / 100.0, 0.25)));
}

std::vector<double> lag_bic_profile(std::span<const double> y,
                                    const Eigen::MatrixXd& base_design, int max_lag) {
  if (max_lag < 0) throw InputError("select_lags_bic: max_lag must be non-negative");
  const auto T = static_cast<long>(y.size());
  const long p = base_design.cols();
  if (p > 0 && base_design.rows() != T) {
    throw InputError("select_lags_bic: base design rows must match the series length");
  }
  const long K = max_lag;
  const long min_length = 2 * K + p + 3;
  if (T < min_length) {
    throw InputError("select_lags_bic: series of length " + std::to_string(T) +
                     " is too short for max_lag " + std::to_string(K) +
                     "; minimum length is " + std::to_string(min_length));
  }

  const long n = T - 1 - K;
  const long cols = p + 1 + K;
  Eigen::MatrixXd X(n, cols);
  Eigen::VectorXd dep(n);
  for (long r = 0; r < n; ++r) {
    const long s = K + 1 + r;
    dep(r) = y[s] - y[s - 1];
    for (long j = 0; j < p; ++j) X(r, j) = base_design(s, j);
    X(r, p) = y[s - 1];
    for (long i = 1; i <= K; ++i) X(r, p + i) = y[s - i] - y[s - i - 1];
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  if (const long bad = first_dependent_column(qr.matrixQR(), X, cols); bad >= 0) {
    throw SingularMatrixError(static_cast<std::size_t>(bad),
                              "select_lags_bic: lag regression is rank deficient at column " +
                                  std::to_string(bad));
  }
  const Eigen::VectorXd qty = qr.householderQ().adjoint() * dep;

  // Nested column order: the SSR of the first m columns is the squared tail
  // of Q'y from index m.
  std::vector<double> bic(static_cast<std::size_t>(K + 1));
  const double dn = static_cast<double>(n);
  for (long k = 0; k <= K; ++k) {
    const long m = p + 1 + k;
    const double ssr = qty.tail(n - m).squaredNorm();
    bic[static_cast<std::size_t>(k)] =
        dn * std::log(ssr / dn) + static_cast<double>(m) * std::log(dn);
  }
  return bic;
}

int select_lags_bic(std::span<const double> y, const Eigen::MatrixXd& base_design,
                    int max_lag) {
  const auto bic = lag_bic_profile(y, base_design, max_lag);
  int best = 0;
  for (int k = 1; k <= max_lag; ++k) {
    if (bic[static_cast<std::size_t>(k)] < bic[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

double DensityCurve::integral() const {
  double sum = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    sum += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return sum;
}

double DensityCurve::mean() const {
  double m = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    m += 0.5 * (grid[i] * density[i] + grid[i - 1] * density[i - 1]) *
         (grid[i] - grid[i - 1]);
  }
  return m / integral();
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw InputError("kde: need at least 2 samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) {
    throw DegenerateInputError("kde: samples have zero variance (point mass)");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(n, -0.2);
}

double kde_at(std::span<const double> samples, double h, double x) {
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h *
                             std::sqrt(2.0 * std::numbers::pi));
  double acc = 0.0;
  for (double s : samples) {
    const double z = (x - s) / h;
    acc += std::exp(-0.5 * z * z);
  }
  return acc * norm;
}

DensityCurve kde(std::span<const double> samples, std::optional<double> bandwidth,
                 std::size_t points) {
  if (samples.size() < 2) throw InputError("kde: need at least 2 samples");
  if (points < 2) throw InputError("kde: need at least 2 grid points");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (*mn == *mx) throw DegenerateInputError("kde: samples have zero variance (point mass)");

  DensityCurve out;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw InputError("kde: bandwidth must be positive");
    out.bandwidth = *bandwidth;
  } else {
    out.bandwidth = silverman_bandwidth(samples);
  }
  const double h = out.bandwidth;
  const double lo = *mn - 3.0 * h;
  const double step = (*mx - *mn + 6.0 * h) / static_cast<double>(points - 1);

  out.grid.resize(points);
  out.density.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    out.grid[i] = lo + static_cast<double>(i) * step;
    out.density[i] = kde_at(samples, h, out.grid[i]);
  }
  return out;
}

}  // namespace gridtrend
