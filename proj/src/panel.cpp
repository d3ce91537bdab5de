#include "gridtrend/panel.hpp"

#include <cmath>
#include <limits>

#include "gridtrend/error.hpp"

namespace gridtrend {

AnnualSeries::AnnualSeries(int start_year, std::vector<std::optional<double>> values,
                           std::string label)
    : start_year_(start_year), values_(std::move(values)), label_(std::move(label)) {}

AnnualSeries AnnualSeries::from_values(int start_year, const std::vector<double>& values,
                                       std::string label) {
  std::vector<std::optional<double>> v(values.begin(), values.end());
  return AnnualSeries(start_year, std::move(v), std::move(label));
}

std::optional<double> AnnualSeries::at_year(int year) const {
  if (year < start_year_ || year > end_year()) return std::nullopt;
  return values_[static_cast<std::size_t>(year - start_year_)];
}

bool AnnualSeries::gap_free() const noexcept { return missing_count() == 0; }

std::size_t AnnualSeries::missing_count() const noexcept {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.has_value() ? 0 : 1;
  return n;
}

std::vector<double> AnnualSeries::dense() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!values_[i]) {
      throw InputError("series '" + label_ + "' is missing year " +
                       std::to_string(start_year_ + static_cast<int>(i)) +
                       "; pass a gap-free window");
    }
    out.push_back(*values_[i]);
  }
  return out;
}

AnnualSeries AnnualSeries::window(int first_year, int last_year) const {
  if (first_year > last_year || first_year < start_year_ || last_year > end_year()) {
    throw InputError("window " + std::to_string(first_year) + "-" +
                     std::to_string(last_year) + " is outside series range " +
                     std::to_string(start_year_) + "-" + std::to_string(end_year()));
  }
  const auto b = values_.begin() + (first_year - start_year_);
  const auto e = values_.begin() + (last_year - start_year_ + 1);
  return AnnualSeries(first_year, std::vector<std::optional<double>>(b, e), label_);
}

std::optional<std::pair<int, int>> AnnualSeries::longest_gap_free_window() const {
  std::size_t best_len = 0, best_start = 0, run = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    run = values_[i] ? run + 1 : 0;
    if (run > best_len) {
      best_len = run;
      best_start = i + 1 - run;
    }
  }
  if (best_len == 0) return std::nullopt;
  const int first = start_year_ + static_cast<int>(best_start);
  return std::make_pair(first, first + static_cast<int>(best_len) - 1);
}

Hemisphere hemisphere_of(double lat) {
  if (std::isnan(lat)) throw InputError("grid latitude is unknown");
  return lat >= 0.0 ? Hemisphere::North : Hemisphere::South;
}

GridPanel::GridPanel(int first_year, std::size_t periods)
    : first_year_(first_year), periods_(periods) {
  if (periods == 0) throw InputError("panel must cover at least one year");
}

void GridPanel::add_row(GridMeta meta, std::span<const double> values,
                        std::span<const std::uint8_t> observed) {
  if (values.size() != periods_ || observed.size() != periods_) {
    throw InputError("grid '" + meta.grid_id + "' row length does not match the panel");
  }
  bool any = false;
  for (std::size_t t = 0; t < periods_; ++t) {
    const bool obs = observed[t] != 0;
    any = any || obs;
    if (obs && !std::isfinite(values[t])) {
      throw InputError("grid '" + meta.grid_id + "' has a non-finite observed value");
    }
    values_.push_back(obs ? values[t] : std::numeric_limits<double>::quiet_NaN());
    observed_.push_back(obs ? 1 : 0);
  }
  if (!any) {
    values_.resize(values_.size() - periods_);
    observed_.resize(observed_.size() - periods_);
    throw InputError("grid '" + meta.grid_id + "' has no observed year");
  }
  meta_.push_back(std::move(meta));
}

double GridPanel::value(std::size_t i, std::size_t t) const {
  if (!observed(i, t)) {
    throw InputError("grid '" + meta_[i].grid_id + "' is not observed in year " +
                     std::to_string(first_year_ + static_cast<int>(t)));
  }
  return values_[i * periods_ + t];
}

AnnualSeries GridPanel::row_series(std::size_t i) const {
  std::vector<std::optional<double>> v(periods_);
  for (std::size_t t = 0; t < periods_; ++t) {
    if (observed(i, t)) v[t] = values_[i * periods_ + t];
  }
  return AnnualSeries(first_year_, std::move(v), meta_[i].grid_id);
}

std::vector<std::size_t> GridPanel::fully_observed_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows(); ++i) {
    bool all = true;
    for (std::size_t t = 0; t < periods_ && all; ++t) all = observed(i, t);
    if (all) out.push_back(i);
  }
  return out;
}

GridPanel GridPanel::select_rows(std::span<const std::size_t> rows) const {
  GridPanel out(first_year_, periods_);
  for (std::size_t i : rows) {
    if (i >= this->rows()) throw InputError("row index out of range");
    out.meta_.push_back(meta_[i]);
    const auto off = static_cast<std::ptrdiff_t>(i * periods_);
    const auto len = static_cast<std::ptrdiff_t>(periods_);
    out.values_.insert(out.values_.end(), values_.begin() + off, values_.begin() + off + len);
    out.observed_.insert(out.observed_.end(), observed_.begin() + off,
                         observed_.begin() + off + len);
  }
  return out;
}

GridPanel GridPanel::window(int first_year, int last_year, std::size_t* dropped) const {
  if (first_year > last_year || first_year < first_year_ || last_year > this->last_year()) {
    throw InputError("window " + std::to_string(first_year) + "-" +
                     std::to_string(last_year) + " is outside panel range " +
                     std::to_string(first_year_) + "-" + std::to_string(this->last_year()));
  }
  const auto t0 = static_cast<std::size_t>(first_year - first_year_);
  const auto len = static_cast<std::size_t>(last_year - first_year + 1);
  GridPanel out(first_year, len);
  std::size_t n_dropped = 0;
  for (std::size_t i = 0; i < rows(); ++i) {
    const std::span<const double> v(values_.data() + i * periods_ + t0, len);
    const std::span<const std::uint8_t> o(observed_.data() + i * periods_ + t0, len);
    bool any = false;
    for (auto flag : o) any = any || flag != 0;
    if (!any) {
      ++n_dropped;
      continue;
    }
    out.add_row(meta_[i], v, o);
  }
  if (dropped) *dropped = n_dropped;
  return out;
}

bool operator==(const GridPanel& a, const GridPanel& b) {
  if (a.first_year_ != b.first_year_ || a.periods_ != b.periods_ ||
      a.meta_.size() != b.meta_.size() || a.observed_ != b.observed_) {
    return false;
  }
  for (std::size_t i = 0; i < a.meta_.size(); ++i) {
    const auto& x = a.meta_[i];
    const auto& y = b.meta_[i];
    if (x.grid_id != y.grid_id || x.lat != y.lat || x.lon != y.lon) return false;
  }
  for (std::size_t k = 0; k < a.values_.size(); ++k) {
    if (a.observed_[k] && a.values_[k] != b.values_[k]) return false;
  }
  return true;
}

}  // namespace gridtrend
