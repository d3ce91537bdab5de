#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridtrend/panel.hpp"

namespace gridtrend {

/// Random engine for all simulation draws.
using Rng = std::mt19937_64;

/// Independent engine for (seed, replication, stream); a pure function of its
/// arguments so replications can run in any order on any thread.
Rng make_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream,
                std::uint64_t attempt = 0);

/// N(mean, sd^2); sd == 0 is a point mass.
struct NormalLaw {
  double mean = 0.0;
  double sd = 0.0;
};

struct LinearGroupLaws {
  NormalLaw beta0;
  NormalLaw beta1;
  NormalLaw rho;
};

/// Two groups of linear trends with AR(1) errors. Defaults are the
/// calibration from fitting the linear model to individual grids.
struct LinearDgpConfig {
  std::size_t n1 = 150;
  std::size_t n2 = 850;
  std::size_t periods = 150;
  LinearGroupLaws group1{{-0.7234, 0.4266}, {0.0108, 0.0043}, {0.264, 0.1176}};
  LinearGroupLaws group2{{-2.36, 0.0}, {0.0271, 0.0145}, {0.155, 0.1747}};
  NormalLaw noise{0.0, 3.0};

  void validate() const;
};

struct BreakGroupLaws {
  NormalLaw alpha0;
  NormalLaw alpha1;
  NormalLaw gamma1;
  NormalLaw gamma2;
  NormalLaw rho;
  /// Break dates are uniform on [ceil(lo T), floor(hi T)].
  double break_lo = 0.3;
  double break_hi = 0.7;
};

/// Two groups of broken trends; group 2 carries the larger mean slope change.
struct BreakDgpConfig {
  std::size_t n1 = 150;
  std::size_t n2 = 850;
  std::size_t periods = 150;
  BreakGroupLaws group1{{-0.6061, 0.5642}, {-0.5524, 0.6899}, {0.0110, 0.0174},
                        {0.0182, 0.0233}, {0.1101, 0.0899}};
  BreakGroupLaws group2{{-0.6061, 0.5642}, {-0.5524, 0.6899}, {0.0110, 0.0174},
                        {0.0271, 0.0145}, {0.1101, 0.0899}};
  NormalLaw noise{0.0, 3.0};

  void validate() const;
};

/// |rho| draws beyond this are clamped to keep every series stationary.
inline constexpr double kRhoBound = 0.99;

/// Simulated values for n1 + n2 series (group 1 first), row-major.
struct SimulatedPanel {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t periods = 0;
  std::vector<double> values;
  /// Per-row break date (broken-trend DGP only).
  std::vector<std::size_t> break_index;
  std::size_t rho_clamps = 0;

  std::size_t rows() const { return n1 + n2; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * periods, periods};
  }
  /// Fully observed panel; grid ids "g1-<k>" / "g2-<k>", latitude NaN.
  GridPanel to_grid_panel(int first_year = 1) const;
};

/// Draw order: per-row intercept, slope and rho; then all noise; the broken
/// DGP then draws its level shift, slope change and break date. With those
/// last laws degenerate at zero it reproduces the linear DGP draw for draw.
SimulatedPanel simulate_linear_panel(const LinearDgpConfig& cfg, Rng& rng);
SimulatedPanel simulate_broken_panel(const BreakDgpConfig& cfg, Rng& rng);

enum class Alternative { Alt1, Alt1Star, Alt2, Alt2Star };

inline constexpr std::array<Alternative, 4> kAllAlternatives = {
    Alternative::Alt1, Alternative::Alt1Star, Alternative::Alt2, Alternative::Alt2Star};

/// "1", "1*", "2", "2*".
std::string alternative_label(Alternative a);
Alternative parse_alternative(const std::string& label);
bool is_star(Alternative a);

struct ObservationConfig {
  Alternative alternative = Alternative::Alt1;
  /// 1-based first period in which late entrants are observed (Alt1 family);
  /// 0 selects periods / 2.
  std::size_t t_star = 0;
  /// Row-stochastic; state 0 = missing, 1 = observed (Alt2 family).
  std::array<std::array<double, 2>, 2> transition{{{0.98, 0.02}, {0.005, 0.995}}};
  double initial_observed_fraction = 0.10;
  /// Alt2 family: observed series never drop out again.
  bool absorbing = false;

  void validate() const;
  std::size_t resolved_t_star(std::size_t periods) const {
    return t_star == 0 ? periods / 2 : t_star;
  }
};

/// Row-major observation indicator for n1 + n2 series.
struct ObservationMatrix {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t periods = 0;
  std::vector<std::uint8_t> observed;

  std::size_t rows() const { return n1 + n2; }
  bool at(std::size_t i, std::size_t t) const { return observed[i * periods + t] != 0; }
  /// 1-based first observed period; periods + 1 when never observed.
  std::size_t entry_time(std::size_t i) const;
  /// Mean entry time over group 1 (g = 1) or group 2 (g = 2).
  double mean_entry_time(int group) const;
};

/// Initially observed units: round(fraction * N) rows, drawn uniformly from
/// both groups, or from group 1 first for the star variants. Alt1: the rest
/// enter at t_star and stay. Alt2: the rest start missing and every row
/// follows the two-state chain from period 2 on.
ObservationMatrix simulate_observation(const ObservationConfig& obs, std::size_t n1,
                                       std::size_t n2, std::size_t periods, Rng& rng);

PanelView make_view(const SimulatedPanel& panel, const ObservationMatrix& obs);

/// Expected share of observed rows per period under the Alt2 chain for a
/// given initial observed share (closed-form Markov marginal).
std::vector<double> alt2_expected_share(const ObservationConfig& obs, std::size_t periods);

enum class DgpKind { Linear, Break };

struct TestSettings {
  double level = 5.0;
  double trimming = 0.15;
  std::optional<int> max_lag;
};

struct SweepSettings {
  std::vector<double> fractions{0.10, 0.25, 0.50, 0.75, 1.00};
  Alternative alternative = Alternative::Alt1;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t replications = 1000;
  /// 0 = hardware concurrency. Does not affect results.
  unsigned workers = 0;
  LinearDgpConfig linear;
  BreakDgpConfig broken;
  /// Shared observation settings; `alternative` is overridden per row.
  ObservationConfig observation;
  std::vector<Alternative> alternatives{kAllAlternatives.begin(), kAllAlternatives.end()};
  TestSettings tests;
  SweepSettings sweep;

  void validate() const;
};

/// Proportions of unit-root non-rejections.
struct RejectionTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  /// counts[row][col] out of `replications`.
  std::vector<std::vector<std::size_t>> counts;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  /// Extra "key: value" lines written into the table header.
  std::vector<std::pair<std::string, std::string>> notes;

  double cell(std::size_t row, std::size_t col) const {
    return static_cast<double>(counts.at(row).at(col)) / static_cast<double>(replications);
  }
  /// Tab-separated, full precision, '#' header lines.
  std::string to_delimited() const;
  /// Aligned columns, percentages with 4 significant digits.
  std::string to_aligned() const;
};

/// Columns: Method A ADF, Method A KP, Method B ADF, Method B KP; one row per
/// configured alternative.
RejectionTable run_experiment(const ExperimentConfig& cfg, DgpKind dgp);

/// Broken-trend DGP under `cfg.sweep.alternative` for each initial fraction.
/// Columns: Method B ADF, Method A ADF.
RejectionTable methodb_signal_sweep(const ExperimentConfig& cfg);

/// Pool-adjacent-violators fit: the closest non-decreasing sequence in
/// least squares.
std::vector<double> isotonic_fit(std::span<const double> y);

/// Canonical JSON of the resolved configuration (every default spelled out,
/// worker count excluded).
std::string resolved_config_json(const ExperimentConfig& cfg);
/// SHA-256 (hex) of resolved_config_json.
std::string config_hash(const ExperimentConfig& cfg);

/// Parses the declarative experiment config. Unknown keys and a missing seed
/// are ConfigErrors.
ExperimentConfig parse_experiment_config(const std::string& json_text);

}  // namespace gridtrend
