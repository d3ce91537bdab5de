#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gridtrend/panel.hpp"
#include "gridtrend/series.hpp"

namespace gridtrend {

enum class AggregationMethod {
  /// Mean over the grids observed in each year.
  A,
  /// Mean over the grids observed in every year.
  B,
};

enum class AreaWeighting { None, CosineLatitude };

/// Land-area share of the northern hemisphere used when no weight is given.
inline constexpr double kDefaultNorthWeight = 0.68;

enum class Summation {
  /// Independent of row order; exact for identical values.
  Canonical,
  /// Plain accumulation in row order (simulation hot path).
  RowOrder,
};

/// Per-period mean over currently observed rows; NaN where no row is observed.
/// `weights` (one per row) may be empty for equal weighting.
std::vector<double> method_a_values(const PanelView& panel, std::span<const double> weights = {},
                                    Summation summation = Summation::Canonical);

/// Rows observed in every period.
std::vector<std::size_t> always_observed_rows(const PanelView& panel);

/// Per-period mean over `rows` (all assumed observed throughout).
std::vector<double> subset_mean_values(const PanelView& panel, std::span<const std::size_t> rows,
                                       std::span<const double> weights = {},
                                       Summation summation = Summation::Canonical);

AnnualSeries method_a(const GridPanel& panel, AreaWeighting weighting = AreaWeighting::None);

/// Throws DataError when no grid is observed in every year; the message
/// names the longest window over which some grid is continuously observed.
AnnualSeries method_b(const GridPanel& panel, AreaWeighting weighting = AreaWeighting::None);

AnnualSeries aggregate(const GridPanel& panel, AggregationMethod method,
                       AreaWeighting weighting = AreaWeighting::None);

struct HemispherePanels {
  GridPanel north;
  GridPanel south;
};

/// Partition rows by the sign of the cell-centre latitude (equator -> north).
/// Either side may come back empty.
HemispherePanels hemispheric_split(const GridPanel& panel);

/// w_nh * nh + (1 - w_nh) * sh per year; missing where either side is.
/// Throws InputError when the year ranges differ or w_nh is outside [0, 1].
AnnualSeries global_average(const AnnualSeries& nh, const AnnualSeries& sh, double w_nh);

}  // namespace gridtrend
