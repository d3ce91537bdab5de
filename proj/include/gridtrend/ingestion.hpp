#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridtrend/panel.hpp"

namespace gridtrend {

/// Cells in the full 5 x 5 degree global lattice (72 x 36).
inline constexpr std::size_t kGridUniverse = 2592;

/// Long-format input:
///
///   grid_id,lat,lon,year,anomaly            (annual)
///   grid_id,lat,lon,year,month,anomaly      (monthly)
///
/// Header required, comma separated, '.' decimals, `missing_token` for
/// missing anomalies. Columns are located by header name.
struct LoadOptions {
  /// Both 0: take the window from the smallest and largest year in the file.
  int first_year = 0;
  int last_year = 0;
  /// Monthly input: a year is present when at least this many months are.
  int min_months = 12;
  std::string missing_token = "NA";
  /// Require cell centres on the 5-degree lattice (+-2.5, +-7.5, ...).
  bool require_5deg_lattice = true;
};

struct LoadReport {
  std::size_t records = 0;
  /// Grids without any observed year inside the window.
  std::size_t dropped_grids = 0;
  bool monthly = false;
};

GridPanel parse_panel(std::istream& in, const LoadOptions& options, LoadReport* report = nullptr);
GridPanel load_panel(const std::filesystem::path& path, const LoadOptions& options,
                     LoadReport* report = nullptr);

/// Writes the annual long format, one line per (grid, year), missing cells as
/// "NA". Numbers use the shortest round-trip representation.
void write_panel(const GridPanel& panel, std::ostream& out);
void save_panel(const GridPanel& panel, const std::filesystem::path& path);

/// For each start year y, the number of grids observed in every year >= y.
std::vector<std::size_t> continuously_observed_from(const GridPanel& panel);

/// N_t / universe for each year.
std::vector<double> nonmissing_proportion(const GridPanel& panel,
                                          std::size_t universe = kGridUniverse);

/// Number of grids observed in each year (N_t).
std::vector<std::size_t> observed_counts(const GridPanel& panel);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace gridtrend
