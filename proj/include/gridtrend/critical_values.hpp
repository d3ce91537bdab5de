#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridtrend {

/// Significance levels (percent) covered by the tables.
inline constexpr std::array<double, 3> kSupportedLevels = {1.0, 5.0, 10.0};

/// Throws InputError listing the supported levels unless `level` is one.
void check_level(double level);

enum class CvTest { Adf, Kp, SupWald };

struct CvRow {
  CvTest test = CvTest::Adf;
  double level = 5.0;
  std::optional<double> lambda;
  std::size_t nobs = 0;
  double value = 0.0;
};

/// Finite-sample critical values, read from a whitespace-delimited text asset
/// with the columns
///
///   test  level  lambda  nobs  value
///
/// `test` is one of adf, kp, supwald. For adf rows lambda is NA and nobs is
/// the number of observations in the Dickey-Fuller regression; kp rows hold
/// break-fraction conditional quantiles indexed by series length; supwald
/// rows store the trimming fraction in the lambda column. Lines starting with
/// '#' are comments; the first non-comment line is the header.
class CriticalValueTable {
 public:
  static CriticalValueTable parse(std::string_view text);
  static CriticalValueTable load(const std::filesystem::path& path);
  /// The table compiled into the library.
  static const CriticalValueTable& embedded();

  /// Response surface c_inf + c1/n + c2/n^2 fitted to the adf rows.
  double adf(std::size_t nobs, double level) const;
  std::array<double, 3> adf_surface(double level) const;

  /// Linear in lambda between tabulated break fractions (clamped at the ends)
  /// and linear in 1/T between tabulated lengths (clamped outside).
  double kp(std::size_t series_length, double lambda, double level) const;

  /// Linear in 1/T between tabulated lengths; trimming must match a
  /// tabulated value.
  double supwald(std::size_t series_length, double trimming, double level) const;

  const std::vector<CvRow>& rows() const noexcept { return rows_; }
  const std::string& format_version() const noexcept { return version_; }

 private:
  std::vector<CvRow> rows_;
  std::string version_;
  std::map<double, std::array<double, 3>> adf_surfaces_;
};

}  // namespace gridtrend
