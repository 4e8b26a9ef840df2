#ifndef AREA_ANGLE_H
#define AREA_ANGLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AaStatus {
  AA_STATUS_OK = 0,
  AA_STATUS_NULL_POINTER = 1,
  AA_STATUS_INVALID_UTF8 = 2,
  AA_STATUS_PARSE = 3,
  AA_STATUS_IO = 4,
  AA_STATUS_INVALID_NETWORK = 5,
  AA_STATUS_INVALID_AREA = 6,
  AA_STATUS_UNKNOWN_BUS = 7,
  AA_STATUS_UNKNOWN_LINE = 8,
  AA_STATUS_LINE_OUT_OF_SERVICE = 9,
  AA_STATUS_ISLANDING = 10,
  AA_STATUS_NOT_AREA_LINE = 11,
  AA_STATUS_DEGENERATE_AREA = 12,
  AA_STATUS_SINGULAR = 13,
  AA_STATUS_DIMENSION_MISMATCH = 14,
  AA_STATUS_UNDEFINED_DIRECTION = 15,
  AA_STATUS_EMPTY_RESULTS = 16,
  AA_STATUS_GENERATOR = 17,
  AA_STATUS_OUT_OF_RANGE = 18,
  AA_STATUS_PANIC = 99,
} AaStatus;

/**
 * An area checked against the network it was loaded with.
 */
typedef struct AaArea AaArea;

/**
 * A validated network.
 */
typedef struct AaNetwork AaNetwork;

/**
 * A baseline or scan report.
 */
typedef struct AaReport AaReport;

/**
 * Base-case area quantities.
 */
typedef struct AaBaseline {
  double theta_area_rad;
  double theta_area_deg;
  double b_area;
  double p_area;
  size_t border_count;
} AaBaseline;

/**
 * One border bus and its weight. `side` is 'a' or 'b'.
 */
typedef struct AaBorderWeight {
  uint32_t bus;
  char side;
  double weight;
} AaBorderWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next library call on the same thread.
 */
const char *aa_last_error(void);

/**
 * Library version as a static string.
 */
const char *aa_version(void);

/**
 * Parses and validates a case document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AaStatus aa_network_from_json(const char *json, struct AaNetwork **out);

/**
 * # Safety
 * `net` must come from [`aa_network_from_json`] or be null.
 */
void aa_network_free(struct AaNetwork *net);

/**
 * # Safety
 * `net` must be a live handle or null.
 */
size_t aa_network_bus_count(const struct AaNetwork *net);

/**
 * # Safety
 * `net` must be a live handle or null.
 */
size_t aa_network_line_count(const struct AaNetwork *net);

/**
 * Parses an area document and checks it against `net`.
 *
 * # Safety
 * `net` must be a live handle, `json` NUL-terminated, `out` valid.
 */
enum AaStatus aa_area_from_json(const struct AaNetwork *net, const char *json, struct AaArea **out);

/**
 * # Safety
 * `area` must come from [`aa_area_from_json`] or be null.
 */
void aa_area_free(struct AaArea *area);

/**
 * Base-case report: weights, area susceptance, angle and power.
 *
 * # Safety
 * Handles must be live and `out` valid. `area` must have been loaded
 * against `net`.
 */
enum AaStatus aa_baseline(const struct AaNetwork *net,
                          const struct AaArea *area,
                          struct AaReport **out);

/**
 * Scans every single line outage inside the area, with severities.
 * `jobs` of 0 uses all cores; `fast_path` non-zero uses low-rank updates.
 *
 * # Safety
 * As for [`aa_baseline`].
 */
enum AaStatus aa_scan(const struct AaNetwork *net,
                      const struct AaArea *area,
                      int32_t fast_path,
                      size_t jobs,
                      struct AaReport **out);

/**
 * # Safety
 * `report` must come from [`aa_baseline`] or [`aa_scan`], or be null.
 */
void aa_report_free(struct AaReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` valid.
 */
enum AaStatus aa_report_baseline(const struct AaReport *report, struct AaBaseline *out);

/**
 * Border weight `index`, side a first.
 *
 * # Safety
 * `report` must be a live handle and `out` valid.
 */
enum AaStatus aa_report_weight(const struct AaReport *report,
                               size_t index,
                               struct AaBorderWeight *out);

/**
 * Number of outage rows; zero for a baseline report.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
size_t aa_report_outage_count(const struct AaReport *report);

/**
 * Report as pretty JSON. Release with [`aa_string_free`].
 *
 * # Safety
 * `report` must be a live handle or null.
 */
char *aa_report_to_json(const struct AaReport *report);

/**
 * Report as CSV, outage rows then the base row. Release with
 * [`aa_string_free`].
 *
 * # Safety
 * `report` must be a live handle or null.
 */
char *aa_report_to_csv(const struct AaReport *report);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void aa_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AREA_ANGLE_H */
