#include "gridtrend/trend_models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gridtrend/critical_values.hpp"
#include "gridtrend/error.hpp"

namespace gridtrend {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.begin(), v.end()}; }

}  // namespace

TrendFit fit_linear_trend(std::span<const double> series) {
  if (series.size() < 10) {
    throw InputError("fit_linear_trend: need at least 10 values, got " +
                     std::to_string(series.size()));
  }
  const auto fit = ols(series, intercept_trend_design(series.size()));
  TrendFit out;
  out.beta0 = fit.coefficients(0);
  out.beta1 = fit.coefficients(1);
  out.ssr = fit.ssr;
  out.nobs = fit.nobs;
  out.residuals = to_vector(fit.residuals);
  out.rho = fit_ar1(out.residuals).rho;
  return out;
}

BreakFit fit_broken_trend(std::span<const double> series, const BreakFitOptions& options) {
  if (series.size() < 20) {
    throw InputError("fit_broken_trend: need at least 20 values, got " +
                     std::to_string(series.size()));
  }
  const auto brk = estimate_break_date(series, options.trimming, options.selector);
  const auto fit = ols(series, broken_trend_design(series.size(), brk.index));
  const auto pre = break_pretest(series, options.trimming, options.pretest_level);

  BreakFit out;
  out.alpha0 = fit.coefficients(0);
  out.alpha1 = fit.coefficients(1);
  out.gamma1 = fit.coefficients(2);
  out.gamma2 = fit.coefficients(3);
  out.break_index = brk.index;
  out.ssr = fit.ssr;
  out.nobs = fit.nobs;
  out.residuals = to_vector(fit.residuals);
  out.rho = fit_ar1(out.residuals).rho;
  out.has_break = pre.reject;
  out.pretest_stat = pre.statistic;
  return out;
}

int newey_west_bandwidth(std::size_t T) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0)));
}

Eigen::MatrixXd newey_west_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& u,
                                      int bandwidth) {
  const long n = X.rows();
  const Eigen::MatrixXd scores = X.array().colwise() * u.array();
  Eigen::MatrixXd S = scores.transpose() * scores;
  for (int l = 1; l <= bandwidth && l < n; ++l) {
    const double w = 1.0 - static_cast<double>(l) / static_cast<double>(bandwidth + 1);
    const Eigen::MatrixXd g = scores.bottomRows(n - l).transpose() * scores.topRows(n - l);
    S += w * (g + g.transpose());
  }
  const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  return xtx_inv * S * xtx_inv;
}

double sup_wald_statistic(std::span<const double> series, double trimming,
                          std::size_t* argmax) {
  const std::size_t T = series.size();
  const auto w = break_window(T, trimming);
  const int bw = newey_west_bandwidth(T);
  double yy = 0.0;
  for (double v : series) yy += v * v;

  double best = -1.0;
  std::size_t best_tb = w.first;
  for (std::size_t tb = w.first; tb <= w.last; ++tb) {
    const auto X = broken_trend_design(T, tb);
    const auto fit = ols(series, X);
    const Eigen::Vector2d rb(fit.coefficients(1), fit.coefficients(3));
    double wald = 0.0;
    if (fit.ssr <= 1e-24 * std::max(yy, 1.0)) {
      wald = rb.norm() > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      const auto V = newey_west_covariance(X, fit.residuals, bw);
      Eigen::Matrix2d vr;
      vr << V(1, 1), V(1, 3), V(3, 1), V(3, 3);
      wald = rb.dot(vr.ldlt().solve(rb));
    }
    if (wald > best) {
      best = wald;
      best_tb = tb;
    }
  }
  if (argmax) *argmax = best_tb;
  return best;
}

PretestResult break_pretest(std::span<const double> series, double trimming, double level) {
  check_level(level);
  PretestResult out;
  out.statistic = sup_wald_statistic(series, trimming, &out.argmax);
  out.critical_value = CriticalValueTable::embedded().supwald(series.size(), trimming, level);
  out.reject = out.statistic > out.critical_value;
  return out;
}

double coefficient_of(const TrendFit& fit, Coefficient which) {
  switch (which) {
    case Coefficient::Beta0: return fit.beta0;
    case Coefficient::Beta1: return fit.beta1;
    case Coefficient::Rho: return fit.rho;
    default: break;
  }
  throw InputError("coefficient is not part of the linear-trend model");
}

double coefficient_of(const BreakFit& fit, Coefficient which) {
  switch (which) {
    case Coefficient::Alpha0: return fit.alpha0;
    case Coefficient::Alpha1: return fit.alpha1;
    case Coefficient::Gamma1: return fit.gamma1;
    case Coefficient::Gamma2: return fit.gamma2;
    case Coefficient::Rho: return fit.rho;
    default: break;
  }
  throw InputError("coefficient is not part of the broken-trend model");
}

namespace {

template <typename Fit>
DensityCurve density_of(std::span<const Fit> fits, Coefficient which) {
  if (fits.size() < 2) throw InputError("slope_density: need at least 2 fits");
  std::vector<double> values;
  values.reserve(fits.size());
  for (const auto& f : fits) values.push_back(coefficient_of(f, which));
  return kde(values);
}

}  // namespace

DensityCurve slope_density(std::span<const TrendFit> fits, Coefficient which) {
  return density_of(fits, which);
}

DensityCurve slope_density(std::span<const BreakFit> fits, Coefficient which) {
  return density_of(fits, which);
}

std::pair<double, double> two_group_average_slopes(std::size_t n1, double beta1_bar,
                                                   std::size_t n2, double beta2_bar) {
  if (n1 < 1 || n2 < 1) throw InputError("two_group_average_slopes: group sizes must be >= 1");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return {beta1_bar, (a * beta1_bar + b * beta2_bar) / (a + b)};
}

}  // namespace gridtrend
