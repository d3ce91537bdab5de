#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gridtrend/stats.hpp"
#include "gridtrend/unit_root.hpp"

namespace gridtrend {

/// y_t = beta0 + beta1 t + e_t, e_t = rho e_{t-1} + v_t, t = 1..T.
struct TrendFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double rho = 0.0;
  double ssr = 0.0;
  std::size_t nobs = 0;
  std::vector<double> residuals;
};

/// y_t = alpha0 + alpha1 DU_t + gamma1 t + gamma2 DT_t + e_t with
/// DU_t = 1{t > TB}, DT_t = 1{t > TB}(t - TB).
struct BreakFit {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::size_t break_index = 0;
  double rho = 0.0;
  double ssr = 0.0;
  std::size_t nobs = 0;
  bool has_break = false;
  /// Sup-Wald statistic of the break pre-test.
  double pretest_stat = 0.0;
  std::vector<double> residuals;

  double post_break_slope() const { return gamma1 + gamma2; }
};

/// Requires a gap-free window of at least 10 values.
TrendFit fit_linear_trend(std::span<const double> series);

struct BreakFitOptions {
  double trimming = kDefaultTrimming;
  double pretest_level = kDefaultLevel;
  BreakSelector selector = BreakSelector::MinSsr;
};

/// Requires at least 20 values. The break date comes from
/// estimate_break_date, has_break from break_pretest.
BreakFit fit_broken_trend(std::span<const double> series, const BreakFitOptions& options = {});

/// Newey-West lag truncation floor(4 (T/100)^(2/9)).
int newey_west_bandwidth(std::size_t T);

/// Newey-West (Bartlett) covariance of OLS coefficients.
Eigen::MatrixXd newey_west_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                                      int bandwidth);

struct PretestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  /// Candidate TB at which the Wald statistic peaks.
  std::size_t argmax = 0;
  bool reject = false;
};

/// sup over the trimmed window of the HAC Wald statistic for alpha1 = gamma2 = 0.
/// An exact fit with a non-zero break component counts as +inf.
double sup_wald_statistic(std::span<const double> series, double trimming,
                          std::size_t* argmax = nullptr);

PretestResult break_pretest(std::span<const double> series, double trimming = kDefaultTrimming,
                            double level = kDefaultLevel);

enum class Coefficient { Beta0, Beta1, Alpha0, Alpha1, Gamma1, Gamma2, Rho };

double coefficient_of(const TrendFit& fit, Coefficient which);
double coefficient_of(const BreakFit& fit, Coefficient which);

/// KDE over one coefficient across a collection of fits.
DensityCurve slope_density(std::span<const TrendFit> fits, Coefficient which = Coefficient::Beta1);
DensityCurve slope_density(std::span<const BreakFit> fits, Coefficient which = Coefficient::Gamma1);

/// Slopes of the average series when n2 grids with mean slope beta2_bar join
/// n1 grids with mean slope beta1_bar: (beta1_bar, weighted mean).
std::pair<double, double> two_group_average_slopes(std::size_t n1, double beta1_bar,
                                                   std::size_t n2, double beta2_bar);

}  // namespace gridtrend
