// gridtrend command-line driver. Talks to the library only through the C API.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridtrend/gridtrend.h"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- errors and exit codes -------------------------------------------

enum Exit {
  kOk = 0,
  kIo = 1,
  kConfig = 2,
  kParse = 3,
  kNumeric = 4,
  kData = 5,
  kInput = 6,
  kInternal = 7,
};

struct CliError {
  int code;
  std::string cls;
  std::string detail;
};

int exit_code(gt_status s) {
  switch (s) {
    case GT_OK: return kOk;
    case GT_ERR_INPUT: return kInput;
    case GT_ERR_PARSE: return kParse;
    case GT_ERR_NUMERIC: return kNumeric;
    case GT_ERR_DATA: return kData;
    case GT_ERR_CONFIG: return kConfig;
    case GT_ERR_IO: return kIo;
    case GT_ERR_INTERNAL: return kInternal;
  }
  return kInternal;
}

void check(gt_status s, const std::string& context = {}) {
  if (s == GT_OK) return;
  std::string detail = gt_last_error();
  if (!context.empty()) detail = context + ": " + detail;
  throw CliError{exit_code(s), gt_status_name(s), detail};
}

[[noreturn]] void fail(int code, const std::string& cls, const std::string& detail) {
  throw CliError{code, cls, detail};
}

// ---- handle ownership ---------------------------------------------------

struct PanelFree {
  void operator()(gt_panel* p) const { gt_panel_free(p); }
};
struct SeriesFree {
  void operator()(gt_series* s) const { gt_series_free(s); }
};
struct ExperimentFree {
  void operator()(gt_experiment* e) const { gt_experiment_free(e); }
};
struct TableFree {
  void operator()(gt_table* t) const { gt_table_free(t); }
};
using Panel = std::unique_ptr<gt_panel, PanelFree>;
using Series = std::unique_ptr<gt_series, SeriesFree>;
using Experiment = std::unique_ptr<gt_experiment, ExperimentFree>;
using Table = std::unique_ptr<gt_table, TableFree>;

Panel load_panel(const std::string& path, int first, int last, int min_months,
                 size_t* dropped = nullptr) {
  gt_panel* p = nullptr;
  check(gt_panel_load(path.c_str(), first, last, min_months, &p, dropped), path);
  return Panel(p);
}

Panel window_panel(const gt_panel* panel, int first, int last, size_t* dropped = nullptr) {
  gt_panel* p = nullptr;
  check(gt_panel_window(panel, first, last, &p, dropped));
  return Panel(p);
}

std::vector<double> values_of(const gt_series* s) {
  std::vector<double> v(gt_series_size(s));
  check(gt_series_values(s, v.data()));
  return v;
}

Series make_series(int start_year, const std::vector<double>& v) {
  gt_series* s = nullptr;
  check(gt_series_new(start_year, v.data(), v.size(), &s));
  return Series(s);
}

bool gap_free(const std::vector<double>& v) {
  return std::none_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
}

// ---- text output ------------------------------------------------------

std::string fmt(double v, const char* spec = "%.17g") {
  if (std::isnan(v)) return "NA";
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kIo, "io-error", "cannot write " + path.string());
  out << text;
  if (!out) fail(kIo, "io-error", "write failed for " + path.string());
}

void write_plot(const fs::path& path, const PlotSpec& spec) {
  if (!write_svg(path.string(), spec)) fail(kIo, "io-error", "cannot write " + path.string());
}

fs::path sibling(const fs::path& output, const std::string& suffix) {
  fs::path p = output;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

// ---- manifest -----------------------------------------------------------

struct Manifest {
  explicit Manifest(std::string cmd) : command(std::move(cmd)) {}

  std::string command;
  json config = json::object();
  std::map<std::string, std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;

  void input(const std::string& path) {
    char hex[65];
    check(gt_sha256_file(path.c_str(), hex), path);
    inputs[path] = hex;
  }

  void write(const fs::path& primary) const {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
    json j = {{"command", command},
              {"config", config},
              {"inputs", inputs},
              {"outputs", outputs},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"version", gt_version()},
              {"timestamp", stamp}};
    write_text(fs::path(primary.string() + ".manifest.json"), j.dump(2) + "\n");
  }
};

// ---- series files ---------------------------------------------------------

struct SeriesFile {
  int start_year = 0;
  std::vector<double> values;
  std::string column;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) {
    while (!cur.empty() && (cur.back() == '\r' || cur.back() == ' ')) cur.pop_back();
    while (!cur.empty() && cur.front() == ' ') cur.erase(cur.begin());
    out.push_back(cur);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// year,<col>[,<col>...]; "NA" marks a missing value; years consecutive.
SeriesFile read_series_file(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) fail(kIo, "io-error", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(kParse, "parse-error", path + ": line 1: missing header");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "year") {
    fail(kParse, "parse-error", path + ": line 1: header must start with 'year'");
  }
  std::size_t col = 1;
  if (!column.empty()) {
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) fail(kInput, "input-error", path + ": no column '" + column + "'");
    col = static_cast<std::size_t>(it - header.begin());
  }
  SeriesFile out;
  out.column = header[col];
  std::size_t lineno = 1;
  int expected = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    const std::string where = path + ": line " + std::to_string(lineno) + ": ";
    if (f.size() != header.size()) fail(kParse, "parse-error", where + "wrong field count");
    int year = 0;
    double v = 0;
    try {
      std::size_t pos = 0;
      year = std::stoi(f[0], &pos);
      if (pos != f[0].size()) throw std::invalid_argument("year");
      if (f[col] == "NA") {
        v = std::nan("");
      } else {
        v = std::stod(f[col], &pos);
        if (pos != f[col].size() || !std::isfinite(v)) throw std::invalid_argument("value");
      }
    } catch (const std::exception&) {
      fail(kParse, "parse-error", where + "bad number");
    }
    if (out.values.empty()) {
      out.start_year = year;
    } else if (year != expected) {
      fail(kParse, "parse-error", where + "years must be consecutive");
    }
    expected = year + 1;
    out.values.push_back(v);
  }
  if (out.values.empty()) fail(kData, "data-error", path + ": no observations");
  return out;
}

// ---- shared analysis steps ----------------------------------------------

struct Options {
  int max_lag = -1;
  double level = 5.0;
  double trimming = 0.15;
  double w_nh = 0.68;
  bool cosine = false;
};

struct HemisphereSeries {
  std::vector<double> nh, sh, globe;
  int start_year = 0;
};

HemisphereSeries aggregate_hemispheres(const gt_panel* panel, gt_method method, double w_nh,
                                       bool cosine) {
  gt_panel *north = nullptr, *south = nullptr;
  check(gt_panel_split(panel, &north, &south));
  Panel n(north), s(south);
  const char* name = method == GT_METHOD_A ? "method A" : "method B";
  if (gt_panel_rows(n.get()) == 0) fail(kData, "data-error", "no northern-hemisphere grids");
  if (gt_panel_rows(s.get()) == 0) fail(kData, "data-error", "no southern-hemisphere grids");
  gt_series *nh = nullptr, *sh = nullptr, *globe = nullptr;
  check(gt_aggregate(n.get(), method, cosine, &nh), std::string(name) + ", northern hemisphere");
  Series nh_s(nh);
  check(gt_aggregate(s.get(), method, cosine, &sh), std::string(name) + ", southern hemisphere");
  Series sh_s(sh);
  check(gt_global_average(nh, sh, w_nh, &globe));
  Series globe_s(globe);
  return {values_of(nh), values_of(sh), values_of(globe), gt_series_start_year(nh)};
}

std::string aggregate_csv(const HemisphereSeries& h) {
  std::ostringstream out;
  out << "year,nh,sh,globe\n";
  for (std::size_t t = 0; t < h.globe.size(); ++t) {
    out << h.start_year + static_cast<int>(t) << ',' << fmt(h.nh[t]) << ',' << fmt(h.sh[t]) << ','
        << fmt(h.globe[t]) << '\n';
  }
  return out.str();
}

std::vector<double> years(int start, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = start + static_cast<double>(i);
  return x;
}

struct TestRow {
  std::string name;
  double stat = 0, cv = 0;
  int lags = 0;
  size_t nobs = 0;
  int break_year = 0;
  bool reject = false;
};

TestRow run_adf(const std::vector<double>& v, const Options& o, const std::string& ctx) {
  gt_adf_result r{};
  check(gt_adf(v.data(), v.size(), o.max_lag, o.level, &r), ctx);
  return {"adf", r.t_stat, o.level == 1 ? r.cv1 : o.level == 10 ? r.cv10 : r.cv5,
          r.lags, r.nobs, 0, r.reject != 0};
}

TestRow run_kp(const std::vector<double>& v, int start_year, const Options& o,
               const std::string& ctx) {
  gt_kp_result r{};
  check(gt_kp(v.data(), v.size(), o.trimming, o.max_lag, o.level, &r), ctx);
  return {"kp", r.t_stat, r.critical_value, r.lags, r.nobs,
          start_year + static_cast<int>(r.break_index) - 1, r.reject != 0};
}

std::string test_header() { return "series\ttest\tstatistic\tcritical_value\tlags\tnobs\tbreak_year\tdecision\n"; }

std::string test_line(const std::string& series, const TestRow& r) {
  std::ostringstream out;
  out << series << '\t' << r.name << '\t' << fmt(r.stat, "%.4f") << '\t' << fmt(r.cv, "%.4f")
      << '\t' << r.lags << '\t' << r.nobs << '\t'
      << (r.name == "kp" ? std::to_string(r.break_year) : std::string("NA")) << '\t'
      << (r.reject ? "reject" : "no-reject") << '\n';
  return out.str();
}

struct PanelTestSummary {
  std::size_t grids = 0, adf_rejections = 0, kp_rejections = 0;
  std::string detail;
};

PanelTestSummary per_grid_tests(const gt_panel* panel, bool adf, bool kp, const Options& o) {
  PanelTestSummary s;
  std::ostringstream out;
  out << "grid_id\ttest\tstatistic\tcritical_value\tlags\tnobs\tbreak_year\tdecision\n";
  const int y0 = gt_panel_first_year(panel);
  for (size_t i = 0; i < gt_panel_rows(panel); ++i) {
    gt_series* row = nullptr;
    check(gt_panel_row(panel, i, &row));
    Series owned(row);
    const auto v = values_of(row);
    if (!gap_free(v)) continue;
    const char* id = nullptr;
    check(gt_panel_grid(panel, i, &id, nullptr, nullptr));
    ++s.grids;
    if (adf) {
      const auto r = run_adf(v, o, std::string("grid ") + id);
      s.adf_rejections += r.reject;
      out << test_line(id, r);
    }
    if (kp) {
      const auto r = run_kp(v, y0, o, std::string("grid ") + id);
      s.kp_rejections += r.reject;
      out << test_line(id, r);
    }
  }
  if (s.grids == 0) fail(kData, "data-error", "no grid is observed in every year of the window");
  s.detail = out.str();
  return s;
}

double share(std::size_t k, std::size_t n) { return n ? 100.0 * static_cast<double>(k) / n : 0; }

struct FitOutcome {
  std::string table;
  std::vector<double> slopes;
  std::size_t grids = 0, breaks = 0;
  std::map<int, std::size_t> break_years;
};

FitOutcome fit_panel(const gt_panel* panel, bool broken, double trimming,
                     const std::string& window) {
  FitOutcome f;
  std::ostringstream out;
  const int y0 = gt_panel_first_year(panel);
  for (size_t i = 0; i < gt_panel_rows(panel); ++i) {
    gt_series* row = nullptr;
    check(gt_panel_row(panel, i, &row));
    Series owned(row);
    const auto v = values_of(row);
    if (!gap_free(v)) continue;
    const char* id = nullptr;
    check(gt_panel_grid(panel, i, &id, nullptr, nullptr));
    ++f.grids;
    if (!broken) {
      gt_trend_fit r{};
      check(gt_fit_linear(v.data(), v.size(), &r), std::string("grid ") + id);
      f.slopes.push_back(r.beta1);
      out << window << '\t' << id << '\t' << fmt(r.beta0) << '\t' << fmt(r.beta1) << '\t'
          << fmt(r.rho) << '\t' << fmt(r.ssr) << '\t' << r.nobs << '\n';
    } else {
      gt_break_fit r{};
      check(gt_fit_broken(v.data(), v.size(), trimming, &r), std::string("grid ") + id);
      const int year = y0 + static_cast<int>(r.break_index) - 1;
      f.slopes.push_back(r.gamma1);
      if (r.has_break) {
        ++f.breaks;
        ++f.break_years[year];
      }
      out << window << '\t' << id << '\t' << fmt(r.alpha0) << '\t' << fmt(r.alpha1) << '\t'
          << fmt(r.gamma1) << '\t' << fmt(r.gamma2) << '\t' << year << '\t'
          << (r.has_break ? "true" : "false") << '\t' << fmt(r.pretest_stat) << '\t'
          << fmt(r.rho) << '\t' << fmt(r.ssr) << '\t' << r.nobs << '\n';
    }
  }
  if (f.grids == 0) {
    fail(kData, "data-error", "window " + window + ": no grid is observed in every year");
  }
  f.table = out.str();
  return f;
}

std::string fit_header(bool broken) {
  return broken ? "window\tgrid_id\talpha0\talpha1\tgamma1\tgamma2\tbreak_year\thas_break\t"
                  "pretest_stat\trho\tssr\tnobs\n"
                : "window\tgrid_id\tbeta0\tbeta1\trho\tssr\tnobs\n";
}

std::string break_summary(const FitOutcome& f, const std::string& window) {
  int modal = 0;
  std::size_t best = 0;
  for (const auto& [y, n] : f.break_years) {
    if (n > best) best = n, modal = y;
  }
  std::ostringstream out;
  out << "window " << window << ": break share " << fmt(share(f.breaks, f.grids), "%.2f")
      << "% of " << f.grids << " grids; modal break year "
      << (best ? std::to_string(modal) : std::string("NA")) << '\n';
  return out.str();
}

struct Window {
  int first = 0, last = 0;
  std::string label() const { return std::to_string(first) + "-" + std::to_string(last); }
};

Window parse_window(const std::string& s) {
  const auto dash = s.find_first_of("-:");
  try {
    if (dash == std::string::npos) throw std::invalid_argument("window");
    Window w{std::stoi(s.substr(0, dash)), std::stoi(s.substr(dash + 1))};
    if (w.first > w.last) throw std::invalid_argument("window");
    return w;
  } catch (const std::exception&) {
    fail(kConfig, "config-error", "window must look like 1880-2022, got '" + s + "'");
  }
}

void check_w_nh(double w) {
  if (!(w > 0.0 && w < 1.0)) {
    fail(kConfig, "config-error", "--w-nh must lie strictly between 0 and 1, got " + fmt(w, "%g"));
  }
}

void kde_outputs(const std::vector<std::pair<std::string, std::vector<double>>>& samples,
                 const fs::path& csv, const fs::path& svg, const std::string& what) {
  std::ostringstream out;
  out << "window,x,density\n";
  PlotSpec plot{"Density of " + what, what, "density", {}};
  for (const auto& [label, v] : samples) {
    if (v.size() < 2) continue;
    const size_t points = 256;
    std::vector<double> grid(points), dens(points);
    double bw = 0;
    check(gt_kde(v.data(), v.size(), 0.0, points, grid.data(), dens.data(), &bw),
          "density " + label);
    for (size_t i = 0; i < points; ++i) out << label << ',' << fmt(grid[i]) << ',' << fmt(dens[i]) << '\n';
    plot.lines.push_back({label, grid, dens});
  }
  write_text(csv, out.str());
  write_plot(svg, plot);
}

// ---- simulation ---------------------------------------------------------

struct SimOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::size_t> replications;
};

Experiment load_experiment(const SimOptions& o) {
  gt_experiment* e = nullptr;
  check(gt_experiment_load(o.config.c_str(), &e), o.config);
  Experiment exp(e);
  if (o.seed) gt_experiment_set_seed(e, *o.seed);
  if (o.workers) gt_experiment_set_workers(e, *o.workers);
  if (o.replications) check(gt_experiment_set_replications(e, *o.replications));
  return exp;
}

void emit_table(gt_experiment* exp, const std::string& which, const fs::path& output,
                Manifest& manifest) {
  gt_table* t = nullptr;
  if (which == "linear") {
    check(gt_experiment_run(exp, GT_DGP_LINEAR, &t));
  } else if (which == "break") {
    check(gt_experiment_run(exp, GT_DGP_BREAK, &t));
  } else {
    check(gt_experiment_sweep(exp, &t));
  }
  Table table(t);
  const std::string aligned = gt_table_format(t, 1);
  write_text(output, aligned);
  const fs::path twin(output.string() + ".tsv");
  write_text(twin, gt_table_format(t, 0));
  manifest.outputs.push_back(output.string());
  manifest.outputs.push_back(twin.string());
  std::cout << aligned << '\n';
}

json sim_config(gt_experiment* exp) { return json::parse(gt_experiment_resolved_json(exp)); }

// ---- subcommands ----------------------------------------------------------

struct IngestArgs {
  std::string input, output;
  int first = 0, last = 0, min_months = 12;
};

void cmd_ingest(const IngestArgs& a, const std::string& argv_line) {
  Manifest m{"ingest"};
  m.input(a.input);
  size_t dropped = 0;
  Panel panel = load_panel(a.input, a.first, a.last, a.min_months, &dropped);
  const fs::path out(a.output);
  check(gt_panel_save(panel.get(), a.output.c_str()));

  const size_t T = gt_panel_periods(panel.get());
  const int y0 = gt_panel_first_year(panel.get());
  std::vector<size_t> counts(T), cont(T);
  check(gt_panel_observed_counts(panel.get(), counts.data()));
  check(gt_panel_continuous_from(panel.get(), cont.data()));

  std::ostringstream obs, run;
  obs << "year,observed_grids,proportion\n";
  run << "start_year,grids_observed_through_end\n";
  std::vector<double> prop(T), contd(T);
  for (size_t t = 0; t < T; ++t) {
    prop[t] = static_cast<double>(counts[t]) / 2592.0;
    contd[t] = static_cast<double>(cont[t]);
    obs << y0 + static_cast<int>(t) << ',' << counts[t] << ',' << fmt(prop[t]) << '\n';
    run << y0 + static_cast<int>(t) << ',' << cont[t] << '\n';
  }
  const auto f_obs = sibling(out, ".observed.csv"), f_run = sibling(out, ".continuous.csv");
  const auto g_obs = sibling(out, ".observed.svg"), g_run = sibling(out, ".continuous.svg");
  write_text(f_obs, obs.str());
  write_text(f_run, run.str());
  const auto x = years(y0, T);
  write_plot(g_obs, {"Proportion of non-missing grids (of 2592)", "year", "proportion",
                     {{"observed", x, prop}}});
  write_plot(g_run, {"Grids observed continuously from each year", "start year", "grids",
                     {{"continuous", x, contd}}});
  m.config = {{"input", a.input}, {"first_year", y0},
              {"last_year", y0 + static_cast<int>(T) - 1}, {"min_months", a.min_months},
              {"argv", argv_line}};
  m.outputs = {a.output, f_obs.string(), f_run.string(), g_obs.string(), g_run.string()};
  m.write(out);
  std::cout << "grids: " << gt_panel_rows(panel.get()) << " (dropped without observations: "
            << dropped << ")\nyears: " << y0 << "-" << y0 + static_cast<int>(T) - 1
            << "\nfully observed grids: " << (T ? cont[0] : 0) << '\n';
}

struct AggregateArgs {
  std::string panel, output, method = "both";
  int first = 0, last = 0;
  Options o;
};

void cmd_aggregate(const AggregateArgs& a, const std::string& argv_line) {
  check_w_nh(a.o.w_nh);
  if (a.method != "A" && a.method != "B" && a.method != "both") {
    fail(kConfig, "config-error", "--method must be A, B or both");
  }
  Manifest m{"aggregate"};
  m.input(a.panel);
  Panel panel = load_panel(a.panel, a.first, a.last, 0);
  const fs::path out(a.output);
  std::vector<std::string> methods;
  if (a.method == "both") {
    methods = {"A", "B"};
  } else {
    methods = {a.method};
  }
  PlotSpec plot{"Average temperature anomalies", "year", "anomaly", {}};
  for (const auto& name : methods) {
    const auto h = aggregate_hemispheres(panel.get(), name == "A" ? GT_METHOD_A : GT_METHOD_B,
                                         a.o.w_nh, a.o.cosine);
    const fs::path file = methods.size() == 1 ? out : sibling(out, "." + name + ".csv");
    write_text(file, aggregate_csv(h));
    m.outputs.push_back(file.string());
    const auto x = years(h.start_year, h.globe.size());
    plot.lines.push_back({"NH " + name, x, h.nh});
    plot.lines.push_back({"SH " + name, x, h.sh});
    plot.lines.push_back({"Globe " + name, x, h.globe});
  }
  const auto svg = sibling(out, ".svg");
  write_plot(svg, plot);
  m.outputs.push_back(svg.string());
  m.config = {{"panel", a.panel}, {"method", a.method}, {"w_nh", a.o.w_nh},
              {"cosine_weighting", a.o.cosine}, {"argv", argv_line}};
  m.write(out);
  for (const auto& f : m.outputs) std::cout << "wrote " << f << '\n';
}

struct UrtestArgs {
  std::string series, panel, column, test = "both", output;
  int first = 0, last = 0;
  Options o;
};

void cmd_urtest(const UrtestArgs& a, const std::string& argv_line) {
  if (a.test != "adf" && a.test != "kp" && a.test != "both") {
    fail(kConfig, "config-error", "--test must be adf, kp or both");
  }
  if (a.series.empty() == a.panel.empty()) {
    fail(kConfig, "config-error", "pass exactly one of --series and --panel");
  }
  const bool adf = a.test != "kp", kp = a.test != "adf";
  Manifest m{"urtest"};
  std::ostringstream text;
  if (!a.series.empty()) {
    m.input(a.series);
    auto s = read_series_file(a.series, a.column);
    Series full = make_series(s.start_year, s.values);
    Series win;
    if (a.first || a.last) {
      gt_series* w = nullptr;
      check(gt_series_window(full.get(), a.first, a.last, &w));
      win.reset(w);
    }
    const gt_series* use = win ? win.get() : full.get();
    const auto v = values_of(use);
    const int y0 = gt_series_start_year(use);
    text << test_header();
    if (adf) text << test_line(s.column, run_adf(v, a.o, s.column));
    if (kp) text << test_line(s.column, run_kp(v, y0, a.o, s.column));
  } else {
    m.input(a.panel);
    Panel panel = load_panel(a.panel, a.first, a.last, 0);
    const auto s = per_grid_tests(panel.get(), adf, kp, a.o);
    text << s.detail;
    std::cout << "grids tested: " << s.grids << '\n';
    if (adf) {
      std::cout << "adf rejection share: " << fmt(share(s.adf_rejections, s.grids), "%.2f")
                << "%\n";
    }
    if (kp) {
      std::cout << "kp rejection share: " << fmt(share(s.kp_rejections, s.grids), "%.2f")
                << "%\n";
    }
  }
  if (!a.output.empty()) {
    write_text(a.output, text.str());
    m.outputs = {a.output};
    m.config = {{"series", a.series}, {"panel", a.panel}, {"column", a.column},
                {"test", a.test}, {"max_lag", a.o.max_lag}, {"level", a.o.level},
                {"trimming", a.o.trimming}, {"argv", argv_line}};
    m.write(a.output);
  }
  if (!a.series.empty() || a.output.empty()) std::cout << text.str();
}

struct FitArgs {
  std::string panel, model = "linear", output;
  std::vector<std::string> windows;
  Options o;
};

void cmd_fit(const FitArgs& a, const std::string& argv_line) {
  if (a.model != "linear" && a.model != "break") {
    fail(kConfig, "config-error", "--model must be linear or break");
  }
  const bool broken = a.model == "break";
  Manifest m{"fit"};
  m.input(a.panel);
  Panel panel = load_panel(a.panel, 0, 0, 0);
  std::vector<Window> windows;
  for (const auto& w : a.windows) windows.push_back(parse_window(w));
  if (windows.empty()) {
    const int y0 = gt_panel_first_year(panel.get());
    windows.push_back({y0, y0 + static_cast<int>(gt_panel_periods(panel.get())) - 1});
  }
  std::string table = fit_header(broken), summary;
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  for (const auto& w : windows) {
    Panel sub = window_panel(panel.get(), w.first, w.last);
    auto f = fit_panel(sub.get(), broken, a.o.trimming, w.label());
    table += f.table;
    if (broken) summary += break_summary(f, w.label());
    samples.emplace_back(w.label(), std::move(f.slopes));
  }
  const fs::path out(a.output);
  write_text(out, table);
  const auto kcsv = sibling(out, ".kde.csv"), ksvg = sibling(out, ".kde.svg");
  kde_outputs(samples, kcsv, ksvg, broken ? "gamma1" : "beta1");
  m.outputs = {a.output, kcsv.string(), ksvg.string()};
  if (broken) {
    const auto sfile = sibling(out, ".summary.txt");
    write_text(sfile, summary);
    m.outputs.push_back(sfile.string());
    std::cout << summary;
  }
  m.config = {{"panel", a.panel}, {"model", a.model}, {"windows", a.windows},
              {"trimming", a.o.trimming}, {"argv", argv_line}};
  m.write(out);
  for (const auto& f : m.outputs) std::cout << "wrote " << f << '\n';
}

struct SimulateArgs {
  SimOptions s;
  std::string table = "linear", output;
};

void cmd_simulate(const SimulateArgs& a, const std::string& argv_line) {
  if (a.table != "linear" && a.table != "break" && a.table != "sweep") {
    fail(kConfig, "config-error", "--table must be linear, break or sweep");
  }
  Manifest m{"simulate"};
  m.input(a.s.config);
  auto exp = load_experiment(a.s);
  m.seed = gt_experiment_seed(exp.get());
  m.config = sim_config(exp.get());
  m.config["table"] = a.table;
  m.config["argv"] = argv_line;
  emit_table(exp.get(), a.table, a.output, m);
  m.write(a.output);
}

struct ReproduceArgs {
  SimOptions s;
  std::string outdir = "results", data;
  int first = 1880, last = 2022, min_months = 12;
  Options o;
};

void cmd_reproduce(const ReproduceArgs& a, const std::string& argv_line) {
  check_w_nh(a.o.w_nh);
  const fs::path dir(a.outdir);
  Manifest m{"reproduce"};
  m.input(a.s.config);
  auto exp = load_experiment(a.s);
  m.seed = gt_experiment_seed(exp.get());
  m.config = sim_config(exp.get());
  m.config["argv"] = argv_line;
  emit_table(exp.get(), "linear", dir / "table3.txt", m);
  emit_table(exp.get(), "break", dir / "table4.txt", m);
  emit_table(exp.get(), "sweep", dir / "methodb_sweep.txt", m);

  if (a.data.empty()) {
    std::cout << "no --data given: Tables 1-2 and the data figures were skipped\n";
    m.write(dir / "reproduce");
    return;
  }
  m.input(a.data);
  Panel panel = load_panel(a.data, a.first, a.last, a.min_months);
  check(gt_panel_save(panel.get(), (dir / "panel.csv").string().c_str()));
  m.outputs.push_back((dir / "panel.csv").string());

  // Observation diagnostics.
  const size_t T = gt_panel_periods(panel.get());
  std::vector<size_t> counts(T), cont(T);
  check(gt_panel_observed_counts(panel.get(), counts.data()));
  check(gt_panel_continuous_from(panel.get(), cont.data()));
  std::ostringstream diag;
  diag << "year,observed_grids,proportion,grids_observed_through_end\n";
  std::vector<double> prop(T);
  for (size_t t = 0; t < T; ++t) {
    prop[t] = static_cast<double>(counts[t]) / 2592.0;
    diag << a.first + static_cast<int>(t) << ',' << counts[t] << ',' << fmt(prop[t]) << ','
         << cont[t] << '\n';
  }
  write_text(dir / "observation.csv", diag.str());
  write_plot(dir / "observation.svg", {"Proportion of non-missing grids (of 2592)", "year",
                                       "proportion", {{"observed", years(a.first, T), prop}}});
  m.outputs.push_back((dir / "observation.csv").string());

  // Aggregates and Table 1.
  std::ostringstream t1;
  t1 << test_header();
  PlotSpec fig2{"Average temperature anomalies", "year", "anomaly", {}};
  for (const auto method : {GT_METHOD_A, GT_METHOD_B}) {
    const std::string name = method == GT_METHOD_A ? "A" : "B";
    const auto h = aggregate_hemispheres(panel.get(), method, a.o.w_nh, a.o.cosine);
    write_text(dir / ("aggregate_" + name + ".csv"), aggregate_csv(h));
    m.outputs.push_back((dir / ("aggregate_" + name + ".csv")).string());
    const auto x = years(h.start_year, h.globe.size());
    for (const auto& [label, v] : {std::pair{"Globe", &h.globe}, std::pair{"NH", &h.nh},
                                   std::pair{"SH", &h.sh}}) {
      const std::string series = std::string(label) + " method " + name;
      fig2.lines.push_back({series, x, *v});
      t1 << test_line(series, run_adf(*v, a.o, series));
      t1 << test_line(series, run_kp(*v, h.start_year, a.o, series));
    }
  }
  write_plot(dir / "aggregates.svg", fig2);
  write_text(dir / "table1.tsv", t1.str());
  m.outputs.push_back((dir / "table1.tsv").string());
  std::cout << t1.str() << '\n';

  // Table 2, break summary and slope densities per window.
  std::ostringstream t2;
  t2 << "sample\tgrids\tadf_rejection_pct\tkp_rejection_pct\n";
  std::string breaks;
  std::vector<std::pair<std::string, std::vector<double>>> slopes;
  for (int start : {a.first, 1920, 1960}) {
    if (start < a.first || start >= a.last) continue;
    const Window w{start, a.last};
    Panel sub = window_panel(panel.get(), w.first, w.last);
    const auto s = per_grid_tests(sub.get(), true, true, a.o);
    t2 << w.label() << '\t' << s.grids << '\t' << fmt(share(s.adf_rejections, s.grids), "%.2f")
       << '\t' << fmt(share(s.kp_rejections, s.grids), "%.2f") << '\n';
    slopes.emplace_back(w.label(), fit_panel(sub.get(), false, a.o.trimming, w.label()).slopes);
    if (start == a.first) breaks += break_summary(fit_panel(sub.get(), true, a.o.trimming, w.label()), w.label());
  }
  write_text(dir / "table2.tsv", t2.str());
  write_text(dir / "breaks.txt", breaks);
  kde_outputs(slopes, dir / "slope_density.csv", dir / "slope_density.svg", "beta1");
  m.outputs.push_back((dir / "table2.tsv").string());
  m.outputs.push_back((dir / "breaks.txt").string());
  m.outputs.push_back((dir / "slope_density.csv").string());
  std::cout << t2.str() << '\n' << breaks;
  m.write(dir / "reproduce");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trend analysis of gridded temperature anomalies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gt_version()));
  std::string argv_line;
  for (int i = 0; i < argc; ++i) argv_line += (i ? " " : "") + std::string(argv[i]);

  auto add_test_opts = [](CLI::App* c, Options& o) {
    c->add_option("--max-lag", o.max_lag, "Largest lag order for BIC (-1: Schwert rule)");
    c->add_option("--level", o.level, "Significance level in percent (1, 5, 10)");
    c->add_option("--trimming", o.trimming, "Break-date trimming fraction");
  };
  auto add_sim_opts = [](CLI::App* c, SimOptions& s) {
    c->add_option("--config", s.config, "Experiment config (JSON)")->required();
    c->add_option("--seed", s.seed, "Override the config seed");
    c->add_option("--workers", s.workers, "Worker threads (0: all cores)");
    c->add_option("--replications", s.replications, "Override the replication count");
  };

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load gridded anomalies into a panel");
  c_ingest->add_option("--input", ingest.input, "Long-format CSV")->required();
  c_ingest->add_option("--first-year", ingest.first, "First year of the window");
  c_ingest->add_option("--last-year", ingest.last, "Last year of the window");
  c_ingest->add_option("--min-months", ingest.min_months, "Months required per year (monthly input)");
  c_ingest->add_option("--output", ingest.output, "Panel file to write")->required();

  AggregateArgs agg;
  auto* c_agg = app.add_subcommand("aggregate", "Hemispheric and global averages");
  c_agg->add_option("--panel", agg.panel, "Panel file")->required();
  c_agg->add_option("--method", agg.method, "A, B or both");
  c_agg->add_option("--w-nh", agg.o.w_nh, "Northern-hemisphere weight in (0, 1)");
  c_agg->add_flag("--cosine-weighting", agg.o.cosine, "Weight grids by cos(latitude)");
  c_agg->add_option("--first-year", agg.first, "First year");
  c_agg->add_option("--last-year", agg.last, "Last year");
  c_agg->add_option("--output", agg.output, "Output CSV")->required();

  UrtestArgs ur;
  auto* c_ur = app.add_subcommand("urtest", "ADF and KP unit-root tests");
  c_ur->add_option("--series", ur.series, "Series CSV (year,value...)");
  c_ur->add_option("--column", ur.column, "Column of the series file");
  c_ur->add_option("--panel", ur.panel, "Panel file: test every gap-free grid");
  c_ur->add_option("--test", ur.test, "adf, kp or both");
  c_ur->add_option("--first-year", ur.first, "First year");
  c_ur->add_option("--last-year", ur.last, "Last year");
  c_ur->add_option("--output", ur.output, "Write results here");
  add_test_opts(c_ur, ur.o);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Per-grid linear or broken trend fits");
  c_fit->add_option("--panel", fit.panel, "Panel file")->required();
  c_fit->add_option("--model", fit.model, "linear or break");
  c_fit->add_option("--window", fit.windows, "Year window, e.g. 1880-2022 (repeatable)");
  c_fit->add_option("--trimming", fit.o.trimming, "Break-date trimming fraction");
  c_fit->add_option("--output", fit.output, "Coefficient file")->required();

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo rejection tables");
  add_sim_opts(c_sim, sim.s);
  c_sim->add_option("--table", sim.table, "linear, break or sweep");
  c_sim->add_option("--output", sim.output, "Table file")->required();

  ReproduceArgs rep;
  auto* c_rep = app.add_subcommand("reproduce", "Run every table and figure");
  add_sim_opts(c_rep, rep.s);
  c_rep->add_option("--outdir", rep.outdir, "Output directory");
  c_rep->add_option("--data", rep.data, "Gridded anomalies (long-format CSV)");
  c_rep->add_option("--first-year", rep.first, "First year of the data window");
  c_rep->add_option("--last-year", rep.last, "Last year of the data window");
  c_rep->add_option("--min-months", rep.min_months, "Months required per year");
  c_rep->add_option("--w-nh", rep.o.w_nh, "Northern-hemisphere weight in (0, 1)");
  add_test_opts(c_rep, rep.o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config-error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (*c_ingest) cmd_ingest(ingest, argv_line);
    if (*c_agg) cmd_aggregate(agg, argv_line);
    if (*c_ur) cmd_urtest(ur, argv_line);
    if (*c_fit) cmd_fit(fit, argv_line);
    if (*c_sim) cmd_simulate(sim, argv_line);
    if (*c_rep) cmd_reproduce(rep, argv_line);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.cls << ": " << e.detail << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: internal-error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
