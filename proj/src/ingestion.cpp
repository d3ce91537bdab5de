#include "gridtrend/ingestion.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "gridtrend/error.hpp"

namespace gridtrend {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_real(std::string_view tok, std::size_t line, const char* field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string("bad ") + field + " '" + std::string(tok) + "'");
  }
  return v;
}

int parse_int(std::string_view tok, std::size_t line, const char* field) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("bad ") + field + " '" + std::string(tok) + "'");
  }
  return v;
}

bool on_lattice(double deg, double limit) {
  if (deg < -limit || deg > limit) return false;
  const double k = (deg + limit) / 5.0;
  return std::abs(k - std::round(k)) < 1e-9;
}

struct GridAccumulator {
  GridMeta meta;
  std::vector<double> sum;
  std::vector<int> count;
  std::vector<std::uint16_t> seen;  // annual: bit 0; monthly: bit (month - 1)
};

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw InputError("cannot format number");
  return std::string(buf.data(), ptr);
}

namespace {

// Smallest and largest year in the body of a long-format file.
std::pair<int, int> year_range(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const auto header = split(line);
  std::size_t c_year = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "year") c_year = j;
  }
  if (c_year == header.size()) throw ParseError(1, "header lacks column 'year'");
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() <= c_year) throw ParseError(lineno, "missing year field");
    const int y = parse_int(f[c_year], lineno, "year");
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  if (lo > hi) throw DataError("input holds no records");
  return {lo, hi};
}

}  // namespace

GridPanel parse_panel(std::istream& in, const LoadOptions& opts_in, LoadReport* report) {
  LoadOptions options = opts_in;
  std::istringstream buffered;
  std::istream* src = &in;
  if (options.first_year == 0 && options.last_year == 0) {
    std::ostringstream all;
    all << in.rdbuf();
    const std::string text = all.str();
    std::tie(options.first_year, options.last_year) = year_range(text);
    buffered.str(text);
    src = &buffered;
  }
  std::istream& input = *src;
  if (options.first_year > options.last_year) {
    throw InputError("empty year window " + std::to_string(options.first_year) + "-" +
                     std::to_string(options.last_year));
  }
  if (options.min_months < 1 || options.min_months > 12) {
    throw InputError("min_months must lie in 1..12");
  }
  const auto periods = static_cast<std::size_t>(options.last_year - options.first_year + 1);

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(input, line)) throw ParseError(1, "missing header");
  ++lineno;
  const auto header = split(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < header.size(); ++j) col[std::string(header[j])] = j;
  for (const char* name : {"grid_id", "lat", "lon", "year", "anomaly"}) {
    if (!col.count(name)) throw ParseError(1, std::string("header lacks column '") + name + "'");
  }
  const bool monthly = col.count("month") > 0;
  const std::size_t c_id = col["grid_id"], c_lat = col["lat"], c_lon = col["lon"],
                    c_year = col["year"], c_val = col["anomaly"];
  const std::size_t c_month = monthly ? col["month"] : 0;

  std::vector<GridAccumulator> grids;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t records = 0;

  while (std::getline(input, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) {
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(f.size()));
    }
    const std::string id(f[c_id]);
    if (id.empty()) throw ParseError(lineno, "empty grid_id");
    const double lat = parse_real(f[c_lat], lineno, "lat");
    const double lon = parse_real(f[c_lon], lineno, "lon");
    const int year = parse_int(f[c_year], lineno, "year");
    int month = 1;
    if (monthly) {
      month = parse_int(f[c_month], lineno, "month");
      if (month < 1 || month > 12) throw ParseError(lineno, "month out of range");
    }
    std::optional<double> value;
    if (f[c_val] != options.missing_token) value = parse_real(f[c_val], lineno, "anomaly");

    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0) {
      throw ParseError(lineno, "coordinates out of range");
    }
    if (options.require_5deg_lattice && (!on_lattice(lat, 87.5) || !on_lattice(lon, 177.5))) {
      throw ParseError(lineno, "cell centre (" + std::string(f[c_lat]) + ", " +
                                   std::string(f[c_lon]) + ") is not on the 5-degree lattice");
    }

    auto [it, inserted] = index.try_emplace(id, grids.size());
    if (inserted) {
      GridAccumulator acc;
      acc.meta = {id, lat, lon};
      acc.sum.assign(periods, 0.0);
      acc.count.assign(periods, 0);
      acc.seen.assign(periods, 0);
      grids.push_back(std::move(acc));
    }
    auto& g = grids[it->second];
    if (g.meta.lat != lat || g.meta.lon != lon) {
      throw ParseError(lineno, "grid '" + id + "' changes coordinates");
    }
    ++records;
    if (year < options.first_year || year > options.last_year) continue;

    const auto t = static_cast<std::size_t>(year - options.first_year);
    const auto bit = static_cast<std::uint16_t>(1u << (month - 1));
    if (g.seen[t] & bit) {
      std::string key = "(" + id + ", " + std::to_string(year);
      if (monthly) key += ", " + std::to_string(month);
      throw ParseError(lineno, "duplicate key " + key + ")");
    }
    g.seen[t] |= bit;
    if (value) {
      g.sum[t] += *value;
      g.count[t] += 1;
    }
  }

  GridPanel panel(options.first_year, periods);
  std::size_t dropped = 0;
  std::vector<double> values(periods);
  std::vector<std::uint8_t> observed(periods);
  for (auto& g : grids) {
    bool any = false;
    for (std::size_t t = 0; t < periods; ++t) {
      const bool ok = monthly ? g.count[t] >= options.min_months : g.count[t] == 1;
      observed[t] = ok ? 1 : 0;
      values[t] = ok ? g.sum[t] / g.count[t] : std::numeric_limits<double>::quiet_NaN();
      any = any || ok;
    }
    if (!any) {
      ++dropped;
      continue;
    }
    panel.add_row(std::move(g.meta), values, observed);
  }
  if (report) {
    report->records = records;
    report->dropped_grids = dropped;
    report->monthly = monthly;
  }
  return panel;
}

GridPanel load_panel(const std::filesystem::path& path, const LoadOptions& options,
                     LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_panel(in, options, report);
}

void write_panel(const GridPanel& panel, std::ostream& out) {
  out << "grid_id,lat,lon,year,anomaly\n";
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    const auto& m = panel.meta(i);
    const std::string prefix = m.grid_id + "," + format_double(m.lat) + "," +
                               format_double(m.lon) + ",";
    for (std::size_t t = 0; t < panel.periods(); ++t) {
      out << prefix << panel.first_year() + static_cast<int>(t) << ','
          << (panel.observed(i, t) ? format_double(panel.value(i, t)) : std::string("NA"))
          << '\n';
    }
  }
}

void save_panel(const GridPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_panel(panel, out);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::size_t> continuously_observed_from(const GridPanel& panel) {
  const std::size_t T = panel.periods();
  // A row counts for start year t when its last gap lies before t.
  std::vector<std::size_t> starts_after(T + 1, 0);
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    std::size_t first_ok = 0;
    for (std::size_t t = T; t-- > 0;) {
      if (!panel.observed(i, t)) {
        first_ok = t + 1;
        break;
      }
    }
    ++starts_after[first_ok];
  }
  std::vector<std::size_t> out(T);
  std::size_t running = 0;
  for (std::size_t t = 0; t < T; ++t) {
    running += starts_after[t];
    out[t] = running;
  }
  return out;
}

std::vector<std::size_t> observed_counts(const GridPanel& panel) {
  std::vector<std::size_t> n(panel.periods(), 0);
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    for (std::size_t t = 0; t < panel.periods(); ++t) n[t] += panel.observed(i, t) ? 1 : 0;
  }
  return n;
}

std::vector<double> nonmissing_proportion(const GridPanel& panel, std::size_t universe) {
  if (universe == 0 || universe < panel.rows()) {
    throw InputError("universe size " + std::to_string(universe) +
                     " is smaller than the number of grids " + std::to_string(panel.rows()));
  }
  const auto n = observed_counts(panel);
  std::vector<double> out(n.size());
  for (std::size_t t = 0; t < n.size(); ++t) {
    out[t] = static_cast<double>(n[t]) / static_cast<double>(universe);
  }
  return out;
}

}  // namespace gridtrend
