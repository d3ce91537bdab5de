#include "gridtrend/gridtrend.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "gridtrend/aggregation.hpp"
#include "gridtrend/critical_values.hpp"
#include "gridtrend/digest.hpp"
#include "gridtrend/error.hpp"
#include "gridtrend/ingestion.hpp"
#include "gridtrend/simulator.hpp"
#include "gridtrend/stats.hpp"
#include "gridtrend/trend_models.hpp"
#include "gridtrend/unit_root.hpp"

struct gt_panel {
  gridtrend::GridPanel panel;
};

struct gt_series {
  gridtrend::AnnualSeries series;
};

struct gt_experiment {
  gridtrend::ExperimentConfig cfg;
  std::string json;
  std::string hash;
};

struct gt_table {
  gridtrend::RejectionTable table;
  std::string text;
};

namespace {

thread_local std::string last_error;

gt_status status_of(gridtrend::ErrorKind kind) {
  using gridtrend::ErrorKind;
  switch (kind) {
    case ErrorKind::Input: return GT_ERR_INPUT;
    case ErrorKind::Parse: return GT_ERR_PARSE;
    case ErrorKind::Numeric: return GT_ERR_NUMERIC;
    case ErrorKind::Data: return GT_ERR_DATA;
    case ErrorKind::Config: return GT_ERR_CONFIG;
    case ErrorKind::Io: return GT_ERR_IO;
  }
  return GT_ERR_INTERNAL;
}

template <typename F>
gt_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return GT_OK;
  } catch (const gridtrend::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return GT_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw gridtrend::InputError(std::string(what) + " is null");
}

std::span<const double> values_of(const double* y, std::size_t n) {
  if (!y && n > 0) throw gridtrend::InputError("series pointer is null");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) {
      throw gridtrend::InputError("series value " + std::to_string(i) +
                                  " is missing or not finite; pass a gap-free window");
    }
  }
  return {y, n};
}

std::optional<int> lag_of(int max_lag) {
  return max_lag < 0 ? std::nullopt : std::optional<int>(max_lag);
}

}  // namespace

extern "C" {

const char* gt_version(void) { return GRIDTREND_VERSION; }

const char* gt_last_error(void) { return last_error.c_str(); }

const char* gt_status_name(gt_status status) {
  switch (status) {
    case GT_OK: return "ok";
    case GT_ERR_INPUT: return "input-error";
    case GT_ERR_PARSE: return "parse-error";
    case GT_ERR_NUMERIC: return "numeric-error";
    case GT_ERR_DATA: return "data-error";
    case GT_ERR_CONFIG: return "config-error";
    case GT_ERR_IO: return "io-error";
    case GT_ERR_INTERNAL: return "internal-error";
  }
  return "internal-error";
}

gt_status gt_sha256_file(const char* path, char* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const auto hex = gridtrend::sha256_file(path);
    std::memcpy(out, hex.c_str(), hex.size() + 1);
  });
}

gt_status gt_panel_load(const char* path, int first_year, int last_year, int min_months,
                        gt_panel** out, size_t* dropped) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    gridtrend::LoadOptions opts;
    opts.first_year = first_year;
    opts.last_year = last_year;
    if (min_months > 0) opts.min_months = min_months;
    gridtrend::LoadReport report;
    auto panel = gridtrend::load_panel(path, opts, &report);
    *out = new gt_panel{std::move(panel)};
    if (dropped) *dropped = report.dropped_grids;
  });
}

gt_status gt_panel_save(const gt_panel* panel, const char* path) {
  return guarded([&] {
    require(panel, "panel");
    require(path, "path");
    gridtrend::save_panel(panel->panel, path);
  });
}

void gt_panel_free(gt_panel* panel) { delete panel; }

size_t gt_panel_rows(const gt_panel* panel) { return panel ? panel->panel.rows() : 0; }
size_t gt_panel_periods(const gt_panel* panel) { return panel ? panel->panel.periods() : 0; }
int gt_panel_first_year(const gt_panel* panel) { return panel ? panel->panel.first_year() : 0; }

gt_status gt_panel_grid(const gt_panel* panel, size_t row, const char** grid_id, double* lat,
                        double* lon) {
  return guarded([&] {
    require(panel, "panel");
    if (row >= panel->panel.rows()) throw gridtrend::InputError("row out of range");
    const auto& m = panel->panel.meta(row);
    if (grid_id) *grid_id = m.grid_id.c_str();
    if (lat) *lat = m.lat;
    if (lon) *lon = m.lon;
  });
}

gt_status gt_panel_row(const gt_panel* panel, size_t row, gt_series** out) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    if (row >= panel->panel.rows()) throw gridtrend::InputError("row out of range");
    *out = new gt_series{panel->panel.row_series(row)};
  });
}

gt_status gt_panel_window(const gt_panel* panel, int first_year, int last_year, gt_panel** out,
                          size_t* dropped) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    std::size_t d = 0;
    auto w = panel->panel.window(first_year, last_year, &d);
    *out = new gt_panel{std::move(w)};
    if (dropped) *dropped = d;
  });
}

gt_status gt_panel_split(const gt_panel* panel, gt_panel** north, gt_panel** south) {
  return guarded([&] {
    require(panel, "panel");
    require(north, "north");
    require(south, "south");
    auto halves = gridtrend::hemispheric_split(panel->panel);
    *north = new gt_panel{std::move(halves.north)};
    *south = new gt_panel{std::move(halves.south)};
  });
}

gt_status gt_panel_observed_counts(const gt_panel* panel, size_t* out) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    const auto n = gridtrend::observed_counts(panel->panel);
    std::copy(n.begin(), n.end(), out);
  });
}

gt_status gt_panel_continuous_from(const gt_panel* panel, size_t* out) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    const auto n = gridtrend::continuously_observed_from(panel->panel);
    std::copy(n.begin(), n.end(), out);
  });
}

gt_status gt_series_new(int start_year, const double* values, size_t n, gt_series** out) {
  return guarded([&] {
    require(out, "out");
    if (!values && n > 0) throw gridtrend::InputError("values is null");
    std::vector<std::optional<double>> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(values[i])) continue;
      if (!std::isfinite(values[i])) throw gridtrend::InputError("series value is infinite");
      v[i] = values[i];
    }
    *out = new gt_series{gridtrend::AnnualSeries(start_year, std::move(v))};
  });
}

void gt_series_free(gt_series* series) { delete series; }
size_t gt_series_size(const gt_series* series) { return series ? series->series.size() : 0; }
int gt_series_start_year(const gt_series* series) {
  return series ? series->series.start_year() : 0;
}

gt_status gt_series_values(const gt_series* series, double* out) {
  return guarded([&] {
    require(series, "series");
    require(out, "out");
    for (std::size_t i = 0; i < series->series.size(); ++i) {
      out[i] = series->series[i].value_or(std::nan(""));
    }
  });
}

gt_status gt_series_window(const gt_series* series, int first_year, int last_year,
                           gt_series** out) {
  return guarded([&] {
    require(series, "series");
    require(out, "out");
    *out = new gt_series{series->series.window(first_year, last_year)};
  });
}

gt_status gt_aggregate(const gt_panel* panel, gt_method method, int cosine_weighting,
                       gt_series** out) {
  return guarded([&] {
    require(panel, "panel");
    require(out, "out");
    if (method != GT_METHOD_A && method != GT_METHOD_B) {
      throw gridtrend::InputError("unknown aggregation method");
    }
    const auto m = method == GT_METHOD_A ? gridtrend::AggregationMethod::A
                                         : gridtrend::AggregationMethod::B;
    const auto w = cosine_weighting ? gridtrend::AreaWeighting::CosineLatitude
                                    : gridtrend::AreaWeighting::None;
    *out = new gt_series{gridtrend::aggregate(panel->panel, m, w)};
  });
}

gt_status gt_global_average(const gt_series* nh, const gt_series* sh, double w_nh,
                            gt_series** out) {
  return guarded([&] {
    require(nh, "nh");
    require(sh, "sh");
    require(out, "out");
    *out = new gt_series{gridtrend::global_average(nh->series, sh->series, w_nh)};
  });
}

gt_status gt_adf(const double* y, size_t n, int max_lag, double level, gt_adf_result* out) {
  return guarded([&] {
    require(out, "out");
    gridtrend::AdfOptions opts;
    opts.max_lag = lag_of(max_lag);
    opts.level = level;
    const auto r = gridtrend::adf_test(values_of(y, n), opts);
    out->t_stat = r.t_stat;
    out->lags = r.lags;
    out->nobs = r.nobs;
    out->cv1 = r.critical_values.at(1.0);
    out->cv5 = r.critical_values.at(5.0);
    out->cv10 = r.critical_values.at(10.0);
    out->level = r.level;
    out->reject = r.reject ? 1 : 0;
  });
}

gt_status gt_kp(const double* y, size_t n, double trimming, int max_lag, double level,
                gt_kp_result* out) {
  return guarded([&] {
    require(out, "out");
    gridtrend::KpOptions opts;
    opts.trimming = trimming;
    opts.max_lag = lag_of(max_lag);
    opts.level = level;
    const auto r = gridtrend::kp_test(values_of(y, n), opts);
    out->t_stat = r.t_stat;
    out->break_index = r.break_index;
    out->break_fraction = r.break_fraction;
    out->lags = r.lags;
    out->nobs = r.nobs;
    out->critical_value = r.critical_value;
    out->level = r.level;
    out->reject = r.reject ? 1 : 0;
  });
}

gt_status gt_adf_critical_value(size_t nobs, double level, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = gridtrend::adf_critical_value(nobs, level);
  });
}

gt_status gt_kp_critical_value(size_t series_length, double lambda, double level, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = gridtrend::kp_critical_value(series_length, lambda, level);
  });
}

gt_status gt_fit_linear(const double* y, size_t n, gt_trend_fit* out) {
  return guarded([&] {
    require(out, "out");
    const auto f = gridtrend::fit_linear_trend(values_of(y, n));
    *out = {f.beta0, f.beta1, f.rho, f.ssr, f.nobs};
  });
}

gt_status gt_fit_broken(const double* y, size_t n, double trimming, gt_break_fit* out) {
  return guarded([&] {
    require(out, "out");
    gridtrend::BreakFitOptions opts;
    opts.trimming = trimming;
    const auto f = gridtrend::fit_broken_trend(values_of(y, n), opts);
    *out = {f.alpha0, f.alpha1,  f.gamma1,  f.gamma2,          f.break_index,
            f.rho,    f.ssr,     f.nobs,    f.has_break ? 1 : 0, f.pretest_stat};
  });
}

gt_status gt_kde(const double* samples, size_t n, double bandwidth, size_t points, double* grid,
                 double* density, double* bandwidth_used) {
  return guarded([&] {
    require(grid, "grid");
    require(density, "density");
    const auto curve = gridtrend::kde(
        values_of(samples, n), bandwidth > 0.0 ? std::optional<double>(bandwidth) : std::nullopt,
        points);
    std::copy(curve.grid.begin(), curve.grid.end(), grid);
    std::copy(curve.density.begin(), curve.density.end(), density);
    if (bandwidth_used) *bandwidth_used = curve.bandwidth;
  });
}

gt_status gt_experiment_parse(const char* json_text, gt_experiment** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new gt_experiment{gridtrend::parse_experiment_config(json_text), {}, {}};
  });
}

gt_status gt_experiment_load(const char* path, gt_experiment** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path);
    if (!in) throw gridtrend::IoError(std::string("cannot open ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    *out = new gt_experiment{gridtrend::parse_experiment_config(text.str()), {}, {}};
  });
}

void gt_experiment_free(gt_experiment* exp) { delete exp; }

void gt_experiment_set_seed(gt_experiment* exp, uint64_t seed) {
  if (exp) exp->cfg.seed = seed;
}

uint64_t gt_experiment_seed(const gt_experiment* exp) { return exp ? exp->cfg.seed : 0; }

void gt_experiment_set_workers(gt_experiment* exp, unsigned workers) {
  if (exp) exp->cfg.workers = workers;
}

gt_status gt_experiment_set_replications(gt_experiment* exp, size_t replications) {
  return guarded([&] {
    require(exp, "experiment");
    if (replications == 0) throw gridtrend::ConfigError("replications must be positive");
    exp->cfg.replications = replications;
  });
}

const char* gt_experiment_resolved_json(gt_experiment* exp) {
  if (!exp) return "";
  exp->json = gridtrend::resolved_config_json(exp->cfg);
  return exp->json.c_str();
}

const char* gt_experiment_hash(gt_experiment* exp) {
  if (!exp) return "";
  exp->hash = gridtrend::config_hash(exp->cfg);
  return exp->hash.c_str();
}

gt_status gt_experiment_run(const gt_experiment* exp, gt_dgp dgp, gt_table** out) {
  return guarded([&] {
    require(exp, "experiment");
    require(out, "out");
    if (dgp != GT_DGP_LINEAR && dgp != GT_DGP_BREAK) throw gridtrend::InputError("unknown DGP");
    auto t = gridtrend::run_experiment(
        exp->cfg, dgp == GT_DGP_LINEAR ? gridtrend::DgpKind::Linear : gridtrend::DgpKind::Break);
    *out = new gt_table{std::move(t), {}};
  });
}

gt_status gt_experiment_sweep(const gt_experiment* exp, gt_table** out) {
  return guarded([&] {
    require(exp, "experiment");
    require(out, "out");
    *out = new gt_table{gridtrend::methodb_signal_sweep(exp->cfg), {}};
  });
}

void gt_table_free(gt_table* table) { delete table; }
size_t gt_table_rows(const gt_table* table) { return table ? table->table.rows.size() : 0; }
size_t gt_table_cols(const gt_table* table) { return table ? table->table.columns.size() : 0; }

const char* gt_table_row_label(const gt_table* table, size_t row) {
  if (!table || row >= table->table.rows.size()) return nullptr;
  return table->table.rows[row].c_str();
}

const char* gt_table_col_label(const gt_table* table, size_t col) {
  if (!table || col >= table->table.columns.size()) return nullptr;
  return table->table.columns[col].c_str();
}

double gt_table_cell(const gt_table* table, size_t row, size_t col) {
  if (!table || row >= table->table.rows.size() || col >= table->table.columns.size()) {
    return std::nan("");
  }
  return table->table.cell(row, col);
}

const char* gt_table_format(gt_table* table, int aligned) {
  if (!table) return "";
  table->text = aligned ? table->table.to_aligned() : table->table.to_delimited();
  return table->text.c_str();
}

}  // extern "C"
