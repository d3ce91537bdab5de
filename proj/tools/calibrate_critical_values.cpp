// Regenerates data/critical_values.tsv by simulation under each test's null.
//
//   adf      DF t-ratio, regression on {1, t, y_{t-1}}, Gaussian random walk;
//            lower-tail quantiles at a ladder of regression sizes.
//   kp       kp_statistic on Gaussian random walks; quantiles conditional on
//            the estimated break fraction (bins of width 0.1).
//   supwald  sup_wald_statistic on a linear trend plus iid N(0,1) noise;
//            upper-tail quantiles.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridtrend/simulator.hpp"
#include "gridtrend/trend_models.hpp"
#include "gridtrend/unit_root.hpp"

namespace {

using gridtrend::Rng;

constexpr double kLevels[] = {1.0, 5.0, 10.0};

double quantile(std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(v.begin(), v.begin() + static_cast<long>(lo), v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + static_cast<long>(lo) + 1, v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

// t-ratio on y_{t-1} in dy_t = a + b s + c y_{t-1} + e, s = 1..n, by
// partialling {1, s} out of both sides.
double df_tstat(const std::vector<double>& y) {
  const std::size_t n = y.size() - 1;
  double ss = 0, sx = 0, sz = 0, ssx = 0, ssz = 0, sxx = 0, szz = 0, sxz = 0, s2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i + 1);
    const double x = y[i];
    const double z = y[i + 1] - y[i];
    ss += s;
    s2 += s * s;
    sx += x;
    sz += z;
    ssx += s * x;
    ssz += s * z;
    sxx += x * x;
    szz += z * z;
    sxz += x * z;
  }
  const double N = static_cast<double>(n);
  const double sbar = ss / N;
  const double Stt = s2 - N * sbar * sbar;
  const double Stx = ssx - sbar * sx;
  const double Stz = ssz - sbar * sz;
  const double Sxx = sxx - sx * sx / N - Stx * Stx / Stt;
  const double Szz = szz - sz * sz / N - Stz * Stz / Stt;
  const double Sxz = sxz - sx * sz / N - Stx * Stz / Stt;
  const double c = Sxz / Sxx;
  const double ssr = Szz - c * Sxz;
  const double se = std::sqrt(ssr / (N - 3.0) / Sxx);
  return c / se;
}

void random_walk(std::vector<double>& y, Rng& rng, std::normal_distribution<double>& z) {
  y[0] = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) y[t] = y[t - 1] + z(rng);
}

void adf_rows(std::ostream& out, std::uint64_t seed, std::size_t reps) {
  const std::size_t sizes[] = {25, 30, 40, 50, 75, 100, 150, 200, 300, 500, 1000};
  for (std::size_t k = 0; k < std::size(sizes); ++k) {
    const std::size_t n = sizes[k];
    Rng rng = gridtrend::make_stream(seed, n, 1);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> y(n + 1), stats(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      random_walk(y, rng, z);
      stats[r] = df_tstat(y);
    }
    for (double level : kLevels) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "adf\t%g\tNA\t%zu\t%.4f\n", level, n,
                    quantile(stats, level / 100.0));
      out << buf;
    }
    std::cerr << "adf n=" << n << " done\n";
  }
}

void kp_rows(std::ostream& out, std::uint64_t seed, std::size_t reps) {
  const std::size_t lengths[] = {50, 75, 100, 150, 200, 300};
  const double centres[] = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  for (std::size_t T : lengths) {
    Rng rng = gridtrend::make_stream(seed, T, 2);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> y(T);
    std::vector<std::vector<double>> bins(std::size(centres));
    for (std::size_t r = 0; r < reps; ++r) {
      random_walk(y, rng, z);
      const auto s = gridtrend::kp_statistic(y);
      const double lam = s.break_date.fraction;
      auto b = static_cast<long>(std::floor((lam - 0.15) / 0.1));
      b = std::clamp<long>(b, 0, static_cast<long>(std::size(centres)) - 1);
      bins[static_cast<std::size_t>(b)].push_back(s.t_stat);
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
      for (double level : kLevels) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "kp\t%g\t%.1f\t%zu\t%.4f\n", level, centres[b], T,
                      quantile(bins[b], level / 100.0));
        out << buf;
      }
    }
    std::cerr << "kp T=" << T << " done\n";
  }
}

void supwald_rows(std::ostream& out, std::uint64_t seed, std::size_t reps, double trimming) {
  const std::size_t lengths[] = {50, 100, 150, 200, 300};
  for (std::size_t T : lengths) {
    Rng rng = gridtrend::make_stream(seed, T, 3);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> y(T), stats(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t t = 0; t < T; ++t) y[t] = 0.01 * static_cast<double>(t + 1) + z(rng);
      stats[r] = gridtrend::sup_wald_statistic(y, trimming);
    }
    for (double level : kLevels) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "supwald\t%g\t%g\t%zu\t%.4f\n", level, trimming, T,
                    quantile(stats, 1.0 - level / 100.0));
      out << buf;
    }
    std::cerr << "supwald T=" << T << " done\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate the critical-value asset"};
  std::string output = "critical_values.tsv";
  std::uint64_t seed = 20240101;
  std::size_t adf_reps = 500000, kp_reps = 100000, sw_reps = 10000;
  app.add_option("-o,--output", output, "Output path");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--adf-reps", adf_reps, "Replications per ADF size");
  app.add_option("--kp-reps", kp_reps, "Replications per KP length");
  app.add_option("--supwald-reps", sw_reps, "Replications per sup-Wald length");
  CLI11_PARSE(app, argc, argv);

  std::ofstream out(output);
  if (!out) {
    std::cerr << "error: io-error: cannot write " << output << '\n';
    return 1;
  }
  out << "# Simulated finite-sample critical values (lower tail for adf/kp, upper tail\n"
         "# for supwald). adf: nobs = observations in the test regression, fitted as\n"
         "# c_inf + c1/n + c2/n^2 at load time. kp: nobs = series length, lambda = centre\n"
         "# of the estimated break-fraction bin, trimming 0.15. supwald: lambda = trimming.\n";
  out << "# seed: " << seed << "; replications adf " << adf_reps << ", kp " << kp_reps
      << ", supwald " << sw_reps << "\n";
  out << "# format-version: 1\n";
  out << "test\tlevel\tlambda\tnobs\tvalue\n";
  adf_rows(out, seed, adf_reps);
  kp_rows(out, seed, kp_reps);
  supwald_rows(out, seed, sw_reps, gridtrend::kDefaultTrimming);
  return out ? 0 : 1;
}
