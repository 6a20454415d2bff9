#ifndef LVMB_H
#define LVMB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes.
 */
typedef enum LvmbStatus {
  LVMB_STATUS_OK = 0,
  LVMB_STATUS_NULL_POINTER = 1,
  LVMB_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or inconsistent JSON input.
   */
  LVMB_STATUS_PARSE = 3,
  LVMB_STATUS_UNKNOWN_EXAMPLE = 4,
  /**
   * The operation needs an LVM verdict.
   */
  LVMB_STATUS_NOT_LVM = 5,
  /**
   * The convexity harness could not build its model.
   */
  LVMB_STATUS_HARNESS = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  LVMB_STATUS_INTERNAL = 7,
} LvmbStatus;

typedef enum LvmbVerdict {
  LVMB_VERDICT_LVM = 0,
  LVMB_VERDICT_LVMB_NOT_LVM = 1,
  LVMB_VERDICT_NOT_LVMB = 2,
} LvmbVerdict;

/**
 * Opaque classification report.
 */
typedef struct LvmbClassification LvmbClassification;

/**
 * Opaque input data (Δ, 𝔥).
 */
typedef struct LvmbData LvmbData;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lvmb_version(void);

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lvmb_last_error(void);

/**
 * Parse input data from JSON.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `out` must be NULL or
 * writable.
 */
enum LvmbStatus lvmb_data_from_json(const char *json, struct LvmbData **out);

/**
 * Built-in data set by name, e.g. `"hopf"` or `"projective-space-3"`.
 *
 * # Safety
 * As for [`lvmb_data_from_json`].
 */
enum LvmbStatus lvmb_data_builtin(const char *name, struct LvmbData **out);

/**
 * Serialize data back to its JSON input form.
 *
 * # Safety
 * `data` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum LvmbStatus lvmb_data_to_json(const struct LvmbData *data, char **out);

/**
 * # Safety
 * `data` must be NULL or a handle not yet freed.
 */
void lvmb_data_free(struct LvmbData *data);

/**
 * Run the full classification.
 *
 * # Safety
 * `data` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum LvmbStatus lvmb_classify(const struct LvmbData *data, struct LvmbClassification **out);

/**
 * # Safety
 * `c` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum LvmbStatus lvmb_classification_verdict(const struct LvmbClassification *c,
                                            enum LvmbVerdict *out);

/**
 * Dimension, facet count and vertex count of P. Fails with
 * `NotLvm` when there is no polytope.
 *
 * # Safety
 * `c` must be NULL or a live handle; the out-pointers must be NULL or
 * writable.
 */
enum LvmbStatus lvmb_classification_polytope_shape(const struct LvmbClassification *c,
                                                   size_t *dim,
                                                   size_t *facets,
                                                   size_t *vertices);

/**
 * Full report as JSON.
 *
 * # Safety
 * `c` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum LvmbStatus lvmb_classification_to_json(const struct LvmbClassification *c, char **out);

/**
 * # Safety
 * `c` must be NULL or a handle not yet freed.
 */
void lvmb_classification_free(struct LvmbClassification *c);

/**
 * Run the convexity harness. Writes the JSON report to `out_json` and the
 * overall result to `out_pass`; either may be NULL if unwanted.
 *
 * # Safety
 * `data` must be NULL or a live handle; out-pointers must be NULL or
 * writable.
 */
enum LvmbStatus lvmb_verify_convexity(const struct LvmbData *data,
                                      size_t samples,
                                      uint64_t seed,
                                      double tol,
                                      char **out_json,
                                      bool *out_pass);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void lvmb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LVMB_H */
