#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridtrend/series.hpp"

namespace gridtrend {

enum class Hemisphere { North, South };

/// Row metadata of a grid panel. Latitude/longitude are the cell centre in
/// degrees; NaN latitude means "unknown".
struct GridMeta {
  std::string grid_id;
  double lat = 0.0;
  double lon = 0.0;
};

/// Hemisphere of a cell centre; the equator counts as north.
Hemisphere hemisphere_of(double lat);

/// Non-owning N x T view over row-major values and observation flags.
/// Cells with observed == 0 are never read.
struct PanelView {
  std::span<const double> values;
  std::span<const std::uint8_t> observed;
  std::size_t rows = 0;
  std::size_t periods = 0;

  bool is_observed(std::size_t i, std::size_t t) const {
    return observed[i * periods + t] != 0;
  }
  double value(std::size_t i, std::size_t t) const { return values[i * periods + t]; }
};

/// N grids x T years of anomalies with their observation indicator.
///
/// Missing cells hold NaN in the value matrix and are never read by the
/// aggregation kernels. Panels assembled from files keep only rows with at
/// least one observed year; `add_row` enforces that.
class GridPanel {
 public:
  GridPanel() = default;
  GridPanel(int first_year, std::size_t periods);

  /// Appends a grid. `values[t]` is ignored where `observed[t]` is false.
  void add_row(GridMeta meta, std::span<const double> values,
               std::span<const std::uint8_t> observed);

  int first_year() const noexcept { return first_year_; }
  int last_year() const noexcept { return first_year_ + static_cast<int>(periods_) - 1; }
  std::size_t rows() const noexcept { return meta_.size(); }
  std::size_t periods() const noexcept { return periods_; }

  const GridMeta& meta(std::size_t i) const { return meta_[i]; }
  bool observed(std::size_t i, std::size_t t) const { return observed_[i * periods_ + t] != 0; }
  /// Value of an observed cell.
  double value(std::size_t i, std::size_t t) const;

  PanelView view() const { return {values_, observed_, rows(), periods_}; }

  /// Grid i's record as a series (missing where unobserved).
  AnnualSeries row_series(std::size_t i) const;

  /// Rows whose every year in the panel is observed.
  std::vector<std::size_t> fully_observed_rows() const;

  /// Sub-panel with the given rows, in the given order.
  GridPanel select_rows(std::span<const std::size_t> rows) const;

  /// Years [first_year, last_year]; rows with no observation inside the
  /// window are dropped and counted in `dropped` when non-null.
  GridPanel window(int first_year, int last_year, std::size_t* dropped = nullptr) const;

  friend bool operator==(const GridPanel& a, const GridPanel& b);

 private:
  int first_year_ = 0;
  std::size_t periods_ = 0;
  std::vector<GridMeta> meta_;
  std::vector<double> values_;
  std::vector<std::uint8_t> observed_;
};

}  // namespace gridtrend
