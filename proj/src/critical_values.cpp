#include "gridtrend/critical_values.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gridtrend/error.hpp"
#include "gridtrend/stats.hpp"

namespace gridtrend {

namespace detail {
extern const std::string_view kEmbeddedCriticalValues;
}

namespace {

bool same(double a, double b) { return std::abs(a - b) < 1e-9; }

double parse_number(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "critical-value table: bad number '" + tok + "'");
  }
  return v;
}

// Linear interpolation of y over ascending x, clamped at the ends.
double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(x.begin(), x.end(), at) - x.begin());
  const std::size_t lo = hi - 1;
  const double w = (at - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + w * (y[hi] - y[lo]);
}

std::string levels_text() {
  std::string s;
  for (double l : kSupportedLevels) {
    if (!s.empty()) s += ", ";
    s += std::to_string(static_cast<int>(l)) + "%";
  }
  return s;
}

}  // namespace

void check_level(double level) {
  for (double l : kSupportedLevels) {
    if (same(l, level)) return;
  }
  std::ostringstream msg;
  msg << "unsupported significance level " << level << "%; supported levels are "
      << levels_text();
  throw InputError(msg.str());
}

CriticalValueTable CriticalValueTable::parse(std::string_view text) {
  CriticalValueTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# format-version:";
      if (line.rfind(key, 0) == 0) {
        std::istringstream v(line.substr(key.size()));
        v >> table.version_;
      }
      continue;
    }
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!header_seen) {
      const std::vector<std::string> expected = {"test", "level", "lambda", "nobs", "value"};
      if (tok != expected) {
        throw ParseError(lineno, "critical-value table: header must be 'test level lambda nobs value'");
      }
      header_seen = true;
      continue;
    }
    if (tok.size() != 5) throw ParseError(lineno, "critical-value table: expected 5 columns");
    CvRow row;
    if (tok[0] == "adf") {
      row.test = CvTest::Adf;
    } else if (tok[0] == "kp") {
      row.test = CvTest::Kp;
    } else if (tok[0] == "supwald") {
      row.test = CvTest::SupWald;
    } else {
      throw ParseError(lineno, "critical-value table: unknown test '" + tok[0] + "'");
    }
    row.level = parse_number(tok[1], lineno);
    if (tok[2] != "NA") row.lambda = parse_number(tok[2], lineno);
    row.nobs = static_cast<std::size_t>(parse_number(tok[3], lineno));
    row.value = parse_number(tok[4], lineno);
    if ((row.test != CvTest::Adf) != row.lambda.has_value()) {
      throw ParseError(lineno, "critical-value table: lambda must be NA exactly for adf rows");
    }
    table.rows_.push_back(row);
  }
  if (!header_seen) throw ParseError(lineno, "critical-value table: missing header");

  for (double level : kSupportedLevels) {
    std::vector<double> y;
    std::vector<std::size_t> nobs;
    for (const auto& r : table.rows_) {
      if (r.test == CvTest::Adf && same(r.level, level)) {
        y.push_back(r.value);
        nobs.push_back(r.nobs);
      }
    }
    if (y.size() < 4) continue;
    Eigen::MatrixXd X(static_cast<long>(y.size()), 3);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double inv = 1.0 / static_cast<double>(nobs[i]);
      X(static_cast<long>(i), 0) = 1.0;
      X(static_cast<long>(i), 1) = inv;
      X(static_cast<long>(i), 2) = inv * inv;
    }
    const auto fit = ols(y, X);
    table.adf_surfaces_[level] = {fit.coefficients(0), fit.coefficients(1), fit.coefficients(2)};
  }
  return table;
}

CriticalValueTable CriticalValueTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open critical-value table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const CriticalValueTable& CriticalValueTable::embedded() {
  static const CriticalValueTable table = parse(detail::kEmbeddedCriticalValues);
  return table;
}

std::array<double, 3> CriticalValueTable::adf_surface(double level) const {
  check_level(level);
  for (const auto& [l, coef] : adf_surfaces_) {
    if (same(l, level)) return coef;
  }
  throw DataError("critical-value table has no adf rows for the requested level");
}

double CriticalValueTable::adf(std::size_t nobs, double level) const {
  if (nobs < 25) throw InputError("adf critical values need at least 25 observations");
  const auto c = adf_surface(level);
  const double inv = 1.0 / static_cast<double>(nobs);
  return c[0] + c[1] * inv + c[2] * inv * inv;
}

double CriticalValueTable::kp(std::size_t series_length, double lambda, double level) const {
  check_level(level);
  std::map<std::size_t, std::vector<std::pair<double, double>>> by_length;
  for (const auto& r : rows_) {
    if (r.test == CvTest::Kp && same(r.level, level)) {
      by_length[r.nobs].emplace_back(*r.lambda, r.value);
    }
  }
  if (by_length.empty()) throw DataError("critical-value table has no kp rows");

  // Interpolate in lambda at each tabulated length, then in 1/T.
  std::vector<double> inv_len, at_lambda;
  for (auto it = by_length.rbegin(); it != by_length.rend(); ++it) {
    auto pts = it->second;
    std::sort(pts.begin(), pts.end());
    std::vector<double> lx, ly;
    for (const auto& [l, v] : pts) {
      lx.push_back(l);
      ly.push_back(v);
    }
    inv_len.push_back(1.0 / static_cast<double>(it->first));
    at_lambda.push_back(interpolate(lx, ly, lambda));
  }
  return interpolate(inv_len, at_lambda, 1.0 / static_cast<double>(series_length));
}

double CriticalValueTable::supwald(std::size_t series_length, double trimming,
                                   double level) const {
  check_level(level);
  std::map<std::size_t, double> by_length;
  std::set<double> trims;
  for (const auto& r : rows_) {
    if (r.test != CvTest::SupWald) continue;
    trims.insert(*r.lambda);
    if (same(*r.lambda, trimming) && same(r.level, level)) by_length[r.nobs] = r.value;
  }
  if (by_length.empty()) {
    std::ostringstream msg;
    msg << "no sup-Wald critical values for trimming " << trimming << "; tabulated:";
    for (double t : trims) msg << ' ' << t;
    throw InputError(msg.str());
  }
  std::vector<double> x, y;
  for (auto it = by_length.rbegin(); it != by_length.rend(); ++it) {
    x.push_back(1.0 / static_cast<double>(it->first));
    y.push_back(it->second);
  }
  return interpolate(x, y, 1.0 / static_cast<double>(series_length));
}

}  // namespace gridtrend
