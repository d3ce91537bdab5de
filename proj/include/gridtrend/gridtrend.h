/* C interface to the gridtrend library.
 *
 * Every fallible call returns a gt_status; on failure gt_last_error() gives a
 * human-readable message for the calling thread. Objects are opaque handles
 * released with the matching free function. Strings returned by accessors
 * are owned by the handle they came from and stay valid until it is freed
 * (or, for the json, hash and format accessors, until the next call on the
 * same handle).
 * Missing values are passed as NaN.
 */
#ifndef GRIDTREND_H
#define GRIDTREND_H

#include <stddef.h>
#include <stdint.h>

#if defined(GRIDTREND_BUILDING_SHARED)
#define GT_API __attribute__((visibility("default")))
#else
#define GT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gt_status {
  GT_OK = 0,
  GT_ERR_INPUT = 1,
  GT_ERR_PARSE = 2,
  GT_ERR_NUMERIC = 3,
  GT_ERR_DATA = 4,
  GT_ERR_CONFIG = 5,
  GT_ERR_IO = 6,
  GT_ERR_INTERNAL = 7
} gt_status;

typedef struct gt_panel gt_panel;
typedef struct gt_series gt_series;
typedef struct gt_experiment gt_experiment;
typedef struct gt_table gt_table;

GT_API const char* gt_version(void);
GT_API const char* gt_last_error(void);
/* "ok", "input-error", "parse-error", "numeric-error", "data-error",
 * "config-error", "io-error", "internal-error". */
GT_API const char* gt_status_name(gt_status status);

/* Lower-case hex SHA-256 of a file; `out` must hold 65 bytes. */
GT_API gt_status gt_sha256_file(const char* path, char* out);

/* ---- panels -------------------------------------------------------- */

/* Long-format CSV (annual or monthly) restricted to [first_year, last_year];
 * 0/0 takes the full year range of the file. min_months <= 0 selects 12. `dropped` (nullable) receives the number of
 * grids without any observation in the window. */
GT_API gt_status gt_panel_load(const char* path, int first_year, int last_year, int min_months,
                               gt_panel** out, size_t* dropped);
GT_API gt_status gt_panel_save(const gt_panel* panel, const char* path);
GT_API void gt_panel_free(gt_panel* panel);

GT_API size_t gt_panel_rows(const gt_panel* panel);
GT_API size_t gt_panel_periods(const gt_panel* panel);
GT_API int gt_panel_first_year(const gt_panel* panel);
GT_API gt_status gt_panel_grid(const gt_panel* panel, size_t row, const char** grid_id,
                               double* lat, double* lon);
GT_API gt_status gt_panel_row(const gt_panel* panel, size_t row, gt_series** out);

GT_API gt_status gt_panel_window(const gt_panel* panel, int first_year, int last_year,
                                 gt_panel** out, size_t* dropped);
/* Equator counts as north; either side may be empty. */
GT_API gt_status gt_panel_split(const gt_panel* panel, gt_panel** north, gt_panel** south);

/* Per year: grids observed (N_t). `out` holds gt_panel_periods values. */
GT_API gt_status gt_panel_observed_counts(const gt_panel* panel, size_t* out);
/* Per start year y: grids observed in every year >= y. */
GT_API gt_status gt_panel_continuous_from(const gt_panel* panel, size_t* out);

/* ---- series -------------------------------------------------------- */

GT_API gt_status gt_series_new(int start_year, const double* values, size_t n, gt_series** out);
GT_API void gt_series_free(gt_series* series);
GT_API size_t gt_series_size(const gt_series* series);
GT_API int gt_series_start_year(const gt_series* series);
/* Copies gt_series_size values into `out`, NaN where missing. */
GT_API gt_status gt_series_values(const gt_series* series, double* out);
GT_API gt_status gt_series_window(const gt_series* series, int first_year, int last_year,
                                  gt_series** out);

typedef enum gt_method { GT_METHOD_A = 0, GT_METHOD_B = 1 } gt_method;

/* cosine_weighting != 0 weights grids by cos(latitude). */
GT_API gt_status gt_aggregate(const gt_panel* panel, gt_method method, int cosine_weighting,
                              gt_series** out);
/* w_nh * nh + (1 - w_nh) * sh; w_nh in [0, 1]. */
GT_API gt_status gt_global_average(const gt_series* nh, const gt_series* sh, double w_nh,
                                   gt_series** out);

/* ---- unit-root tests and trend fits -------------------------------- */

typedef struct gt_adf_result {
  double t_stat;
  int lags;
  size_t nobs;
  double cv1, cv5, cv10;
  double level;
  int reject;
} gt_adf_result;

typedef struct gt_kp_result {
  double t_stat;
  size_t break_index; /* TB, 1-based; new regime from TB + 1 */
  double break_fraction;
  int lags;
  size_t nobs;
  double critical_value;
  double level;
  int reject;
} gt_kp_result;

/* max_lag < 0 selects Schwert's rule. */
GT_API gt_status gt_adf(const double* y, size_t n, int max_lag, double level, gt_adf_result* out);
GT_API gt_status gt_kp(const double* y, size_t n, double trimming, int max_lag, double level,
                       gt_kp_result* out);
GT_API gt_status gt_adf_critical_value(size_t nobs, double level, double* out);
GT_API gt_status gt_kp_critical_value(size_t series_length, double lambda, double level,
                                      double* out);

typedef struct gt_trend_fit {
  double beta0, beta1, rho, ssr;
  size_t nobs;
} gt_trend_fit;

typedef struct gt_break_fit {
  double alpha0, alpha1, gamma1, gamma2;
  size_t break_index;
  double rho, ssr;
  size_t nobs;
  int has_break;
  double pretest_stat;
} gt_break_fit;

GT_API gt_status gt_fit_linear(const double* y, size_t n, gt_trend_fit* out);
GT_API gt_status gt_fit_broken(const double* y, size_t n, double trimming, gt_break_fit* out);

/* Gaussian KDE on `points` grid values; bandwidth <= 0 selects Silverman's
 * rule. `grid` and `density` hold `points` values each. */
GT_API gt_status gt_kde(const double* samples, size_t n, double bandwidth, size_t points,
                        double* grid, double* density, double* bandwidth_used);

/* ---- simulation experiments ---------------------------------------- */

typedef enum gt_dgp { GT_DGP_LINEAR = 0, GT_DGP_BREAK = 1 } gt_dgp;

GT_API gt_status gt_experiment_parse(const char* json_text, gt_experiment** out);
GT_API gt_status gt_experiment_load(const char* path, gt_experiment** out);
GT_API void gt_experiment_free(gt_experiment* exp);
GT_API void gt_experiment_set_seed(gt_experiment* exp, uint64_t seed);
GT_API uint64_t gt_experiment_seed(const gt_experiment* exp);
/* 0 = all cores. Results do not depend on the worker count. */
GT_API void gt_experiment_set_workers(gt_experiment* exp, unsigned workers);
GT_API gt_status gt_experiment_set_replications(gt_experiment* exp, size_t replications);
/* Canonical resolved configuration and its SHA-256. */
GT_API const char* gt_experiment_resolved_json(gt_experiment* exp);
GT_API const char* gt_experiment_hash(gt_experiment* exp);

GT_API gt_status gt_experiment_run(const gt_experiment* exp, gt_dgp dgp, gt_table** out);
GT_API gt_status gt_experiment_sweep(const gt_experiment* exp, gt_table** out);

GT_API void gt_table_free(gt_table* table);
GT_API size_t gt_table_rows(const gt_table* table);
GT_API size_t gt_table_cols(const gt_table* table);
GT_API const char* gt_table_row_label(const gt_table* table, size_t row);
GT_API const char* gt_table_col_label(const gt_table* table, size_t col);
/* Share of replications in which the unit root was not rejected. */
GT_API double gt_table_cell(const gt_table* table, size_t row, size_t col);
/* aligned != 0: fixed-width, 4 significant digits; else tab-delimited at
 * full precision. */
GT_API const char* gt_table_format(gt_table* table, int aligned);

#ifdef __cplusplus
}
#endif

#endif /* GRIDTREND_H */
