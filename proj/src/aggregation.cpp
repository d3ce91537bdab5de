#include "gridtrend/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gridtrend/error.hpp"

namespace gridtrend {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> row_weights(const GridPanel& panel, AreaWeighting weighting) {
  if (weighting == AreaWeighting::None) return {};
  std::vector<double> w(panel.rows());
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    const double lat = panel.meta(i).lat;
    if (std::isnan(lat)) throw InputError("cosine weighting needs grid latitudes");
    w[i] = std::cos(lat * std::numbers::pi / 180.0);
  }
  return w;
}

// Canonical summation sorts the cell and accumulates in long double, so the
// result does not depend on row order and a column of identical values
// averages to that value exactly.
double weighted_mean(std::vector<std::pair<double, double>>& cell, Summation summation) {
  if (summation == Summation::RowOrder) {
    double sum = 0.0, norm = 0.0;
    for (const auto& [v, w] : cell) {
      sum += w * v;
      norm += w;
    }
    return sum / norm;
  }
  std::sort(cell.begin(), cell.end());
  long double sum = 0.0L, norm = 0.0L;
  for (const auto& [v, w] : cell) {
    sum += static_cast<long double>(w) * static_cast<long double>(v);
    norm += static_cast<long double>(w);
  }
  return static_cast<double>(sum / norm);
}

AnnualSeries to_series(int start_year, const std::vector<double>& v, std::string label) {
  std::vector<std::optional<double>> out(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (!std::isnan(v[t])) out[t] = v[t];
  }
  return AnnualSeries(start_year, std::move(out), std::move(label));
}

}  // namespace

std::vector<double> method_a_values(const PanelView& panel, std::span<const double> weights,
                                    Summation summation) {
  std::vector<double> out(panel.periods, kNaN);
  std::vector<std::pair<double, double>> cell;
  cell.reserve(panel.rows);
  for (std::size_t t = 0; t < panel.periods; ++t) {
    cell.clear();
    for (std::size_t i = 0; i < panel.rows; ++i) {
      if (panel.is_observed(i, t)) {
        cell.emplace_back(panel.value(i, t), weights.empty() ? 1.0 : weights[i]);
      }
    }
    if (!cell.empty()) out[t] = weighted_mean(cell, summation);
  }
  return out;
}

std::vector<std::size_t> always_observed_rows(const PanelView& panel) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < panel.rows; ++i) {
    bool all = true;
    for (std::size_t t = 0; t < panel.periods && all; ++t) all = panel.is_observed(i, t);
    if (all) rows.push_back(i);
  }
  return rows;
}

std::vector<double> subset_mean_values(const PanelView& panel, std::span<const std::size_t> rows,
                                       std::span<const double> weights, Summation summation) {
  std::vector<double> out(panel.periods, kNaN);
  if (rows.empty()) return out;
  std::vector<std::pair<double, double>> cell;
  cell.reserve(rows.size());
  for (std::size_t t = 0; t < panel.periods; ++t) {
    cell.clear();
    for (std::size_t i : rows) {
      cell.emplace_back(panel.value(i, t), weights.empty() ? 1.0 : weights[i]);
    }
    out[t] = weighted_mean(cell, summation);
  }
  return out;
}

AnnualSeries method_a(const GridPanel& panel, AreaWeighting weighting) {
  const auto w = row_weights(panel, weighting);
  return to_series(panel.first_year(), method_a_values(panel.view(), w), "method A");
}

AnnualSeries method_b(const GridPanel& panel, AreaWeighting weighting) {
  const auto view = panel.view();
  const auto rows = always_observed_rows(view);
  if (rows.empty()) {
    std::string hint = "no grid has any observation";
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < panel.rows(); ++i) {
      const auto run = panel.row_series(i).longest_gap_free_window();
      if (!run) continue;
      const auto len = static_cast<std::size_t>(run->second - run->first + 1);
      if (len > best_len) {
        best_len = len;
        hint = "longest fully-observed sub-window is " + std::to_string(run->first) + "-" +
               std::to_string(run->second) + " (grid " + panel.meta(i).grid_id + ")";
      }
    }
    throw DataError("method B: no grid is observed in every year " +
                    std::to_string(panel.first_year()) + "-" +
                    std::to_string(panel.last_year()) + "; " + hint);
  }
  const auto w = row_weights(panel, weighting);
  return to_series(panel.first_year(), subset_mean_values(view, rows, w), "method B");
}

AnnualSeries aggregate(const GridPanel& panel, AggregationMethod method, AreaWeighting weighting) {
  return method == AggregationMethod::A ? method_a(panel, weighting)
                                        : method_b(panel, weighting);
}

HemispherePanels hemispheric_split(const GridPanel& panel) {
  std::vector<std::size_t> north, south;
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    if (hemisphere_of(panel.meta(i).lat) == Hemisphere::North) {
      north.push_back(i);
    } else {
      south.push_back(i);
    }
  }
  return {panel.select_rows(north), panel.select_rows(south)};
}

AnnualSeries global_average(const AnnualSeries& nh, const AnnualSeries& sh, double w_nh) {
  if (!(w_nh >= 0.0 && w_nh <= 1.0)) {
    throw InputError("northern-hemisphere weight must lie in [0, 1]");
  }
  if (nh.start_year() != sh.start_year() || nh.size() != sh.size()) {
    throw InputError("hemispheric series cover different years: " +
                     std::to_string(nh.start_year()) + "-" + std::to_string(nh.end_year()) +
                     " vs " + std::to_string(sh.start_year()) + "-" +
                     std::to_string(sh.end_year()));
  }
  if (nh.size() == 0) throw InputError("hemispheric series are empty");
  std::vector<std::optional<double>> out(nh.size());
  for (std::size_t t = 0; t < nh.size(); ++t) {
    if (nh[t] && sh[t]) out[t] = w_nh * *nh[t] + (1.0 - w_nh) * *sh[t];
  }
  return AnnualSeries(nh.start_year(), std::move(out), "globe");
}

}  // namespace gridtrend
