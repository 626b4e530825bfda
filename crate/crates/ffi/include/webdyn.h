#ifndef WEBDYN_H
#define WEBDYN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Number of bow-tie components, the length of the array filled by
 * [`webdyn_series_component_sizes`].
 */
#define WEBDYN_COMPONENT_COUNT 7

/**
 * Number of migration states; the migration matrix has this many rows and
 * columns.
 */
#define WEBDYN_STATE_COUNT 10

typedef enum WebdynGrowthMethod {
  WEBDYN_GROWTH_METHOD_LOG_LINEAR = 0,
  WEBDYN_GROWTH_METHOD_RATIO_THROUGH_ORIGIN = 1,
} WebdynGrowthMethod;

typedef enum WebdynStatus {
  WEBDYN_STATUS_OK = 0,
  WEBDYN_STATUS_NULL_POINTER = 1,
  WEBDYN_STATUS_INVALID_UTF8 = 2,
  WEBDYN_STATUS_IO = 3,
  WEBDYN_STATUS_PARSE = 4,
  WEBDYN_STATUS_INVALID_INPUT = 5,
  WEBDYN_STATUS_INSUFFICIENT_DATA = 6,
  WEBDYN_STATUS_CONFIG = 7,
  WEBDYN_STATUS_OUT_OF_RANGE = 8,
  WEBDYN_STATUS_PANIC = 9,
} WebdynStatus;

/**
 * A loaded or generated snapshot series with its derived analyses.
 */
typedef struct WebdynSeries WebdynSeries;

/**
 * Collection statistics of one snapshot.
 */
typedef struct WebdynStats {
  int32_t label;
  uint64_t crawled_sites;
  uint64_t new_sites;
  uint64_t unknown_sites;
  uint64_t dead_sites;
  uint64_t total_pages;
  uint64_t total_content_bytes;
  uint64_t one_page_sites;
  double one_page_share;
} WebdynStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful one. Valid until the next call into the library.
 */
const char *webdyn_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *webdyn_version(void);

/**
 * Loads every `<dir>/<year>/` snapshot. Years whose links table is
 * unreadable are kept without a hostgraph.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` a writable pointer.
 */
enum WebdynStatus webdyn_series_load(const char *dir, struct WebdynSeries **out);

/**
 * Generates a synthetic series. `config_json` may be NULL for the default
 * configuration; missing fields take their defaults.
 *
 * # Safety
 * `config_json` must be NULL or a NUL-terminated string, and `out` a
 * writable pointer.
 */
enum WebdynStatus webdyn_series_generate(const char *config_json, struct WebdynSeries **out);

/**
 * # Safety
 * `series` must be NULL or a handle from this library not yet freed.
 */
void webdyn_series_free(struct WebdynSeries *series);

/**
 * # Safety
 * `series` must be a live handle and `out` a writable pointer.
 */
enum WebdynStatus webdyn_series_len(const struct WebdynSeries *series, size_t *out);

/**
 * Year label of the snapshot at `index`.
 *
 * # Safety
 * `series` must be a live handle and `out` a writable pointer.
 */
enum WebdynStatus webdyn_series_label(const struct WebdynSeries *series,
                                      size_t index,
                                      int32_t *out);

/**
 * # Safety
 * `series` must be a live handle and `out` a writable pointer.
 */
enum WebdynStatus webdyn_series_stats(const struct WebdynSeries *series,
                                      size_t index,
                                      struct WebdynStats *out);

/**
 * Site counts per bow-tie component in the order MAIN, OUT, IN, ISLAND,
 * TUNNEL, TIN, TOUT.
 *
 * # Safety
 * `series` must be a live handle and `out` must point to
 * `WEBDYN_COMPONENT_COUNT` writable values.
 */
enum WebdynStatus webdyn_series_component_sizes(const struct WebdynSeries *series,
                                                size_t index,
                                                uint64_t *out);

/**
 * Year-over-year transition counts, row-major `[from][to]` over
 * MAIN, OUT, IN, ISLAND, TUNNEL, TIN, TOUT, UNKNOWN, DEAD, NEW.
 *
 * # Safety
 * `series` must be a live handle and `out` must point to
 * `WEBDYN_STATE_COUNT * WEBDYN_STATE_COUNT` writable values.
 */
enum WebdynStatus webdyn_series_migration_counts(const struct WebdynSeries *series, uint64_t *out);

/**
 * Full report as pretty-printed JSON. The string must be released with
 * [`webdyn_string_free`]. Section failures are reported inside the JSON,
 * not through the status.
 *
 * # Safety
 * `series` must be a live handle and `out` a writable pointer.
 */
enum WebdynStatus webdyn_series_report_json(const struct WebdynSeries *series, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void webdyn_string_free(char *s);

/**
 * Per-step factor of `values[n] = factor * values[n-1]`.
 *
 * # Safety
 * `values` must point to `len` readable values, `method` must be one of
 * the declared variants and `factor` must be writable.
 */
enum WebdynStatus webdyn_fit_growth(const double *values,
                                    size_t len,
                                    enum WebdynGrowthMethod method,
                                    double *factor);

/**
 * Exponent `theta` of `freq(x) ~ k / x^theta` fitted on the points with
 * `min <= x <= max`.
 *
 * # Safety
 * `x` and `freq` must each point to `len` readable values, and `theta` and
 * `log_k` must be writable (`log_k` may be NULL).
 */
enum WebdynStatus webdyn_fit_powerlaw(const double *x,
                                      const uint64_t *freq,
                                      size_t len,
                                      double min,
                                      double max,
                                      double *theta,
                                      double *log_k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEBDYN_H */
