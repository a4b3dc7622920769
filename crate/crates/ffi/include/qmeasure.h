#ifndef QMEASURE_H
#define QMEASURE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QmFormat {
  QM_FORMAT_TABLE = 0,
  QM_FORMAT_JSON = 1,
} QmFormat;

/**
 * Status codes. The first four match the CLI exit codes.
 */
typedef enum QmStatus {
  QM_STATUS_OK = 0,
  QM_STATUS_VALIDATION = 1,
  QM_STATUS_NUMERICAL = 2,
  QM_STATUS_INTERNAL = 3,
  QM_STATUS_NULL_POINTER = 4,
  QM_STATUS_UTF8 = 5,
} QmStatus;

/**
 * Output of `qm_run` or `qm_run_cat`.
 */
typedef struct QmReport QmReport;

/**
 * A parsed and validated scenario.
 */
typedef struct QmScenario QmScenario;

/**
 * Result of `qm_compare`.
 */
typedef struct QmComparison {
  size_t dim;
  size_t n_random;
  uint64_t seed;
  double scenario_deviation;
  double worst_deviation;
  double mean_deviation;
  size_t worst_case;
} QmComparison;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on this thread.
 */
const char *qm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qm_version(void);

/**
 * Parses a scenario JSON document.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be valid for writes.
 */
enum QmStatus qm_scenario_parse(const char *json, struct QmScenario **out);

/**
 * # Safety
 * `scenario` must come from `qm_scenario_parse` and not be freed twice.
 */
void qm_scenario_free(struct QmScenario *scenario);

/**
 * System dimension of a scenario, or 0 for NULL.
 *
 * # Safety
 * `scenario` must be NULL or a live handle.
 */
size_t qm_scenario_system_dim(const struct QmScenario *scenario);

/**
 * Runs a scenario.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_run(const struct QmScenario *scenario, struct QmReport **out);

/**
 * Cat superposition on a spin chain of `chain_length` sites, or on a single
 * pointer of dimension `macro_dim` when that is nonzero.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QmStatus qm_run_cat(double c1_re,
                         double c1_im,
                         double c2_re,
                         double c2_im,
                         uint32_t chain_length,
                         size_t macro_dim,
                         struct QmReport **out);

/**
 * Compares collapse with restriction on `n_random` random cases.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_compare(const struct QmScenario *scenario,
                         size_t n_random,
                         uint64_t seed,
                         struct QmComparison *out);

/**
 * # Safety
 * `report` must come from `qm_run`/`qm_run_cat` and not be freed twice.
 */
void qm_report_free(struct QmReport *report);

/**
 * Number of outcomes in a report, or 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
size_t qm_report_outcome_count(const struct QmReport *report);

/**
 * Copies outcomes and their Born probabilities into caller buffers of
 * length `len`, which must be at least `qm_report_outcome_count`. Either
 * buffer may be NULL to skip it.
 *
 * # Safety
 * Non-NULL buffers must be valid for `len` writes.
 */
enum QmStatus qm_report_born(const struct QmReport *report,
                             double *outcomes,
                             double *probabilities,
                             size_t len);

/**
 * Largest disagreement among the Born, collapsed and restricted weights.
 *
 * # Safety
 * `report` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_report_max_deviation(const struct QmReport *report, double *out);

/**
 * Renders a report. Release the string with `qm_string_free`.
 *
 * # Safety
 * `report` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_report_render(const struct QmReport *report, enum QmFormat format, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void qm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMEASURE_H */
