#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gridtrend {

/// A yearly sequence whose entries may be missing.
class AnnualSeries {
 public:
  AnnualSeries() = default;
  AnnualSeries(int start_year, std::vector<std::optional<double>> values,
               std::string label = {});

  /// Gap-free series.
  static AnnualSeries from_values(int start_year, const std::vector<double>& values,
                                  std::string label = {});

  int start_year() const noexcept { return start_year_; }
  int end_year() const noexcept {
    return start_year_ + static_cast<int>(values_.size()) - 1;
  }
  std::size_t size() const noexcept { return values_.size(); }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  const std::vector<std::optional<double>>& values() const noexcept { return values_; }
  const std::optional<double>& operator[](std::size_t i) const { return values_[i]; }
  std::optional<double> at_year(int year) const;

  bool gap_free() const noexcept;
  std::size_t missing_count() const noexcept;

  /// The values as a plain vector. Throws InputError naming the first missing
  /// year when the series has gaps.
  std::vector<double> dense() const;

  /// Sub-series covering [first_year, last_year]; both must lie inside.
  AnnualSeries window(int first_year, int last_year) const;

  /// Longest run of consecutive present values, as (first_year, last_year).
  /// Returns nullopt when every entry is missing.
  std::optional<std::pair<int, int>> longest_gap_free_window() const;

 private:
  int start_year_ = 0;
  std::vector<std::optional<double>> values_;
  std::string label_;
};

}  // namespace gridtrend
