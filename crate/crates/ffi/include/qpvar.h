#ifndef QPVAR_H
#define QPVAR_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum QpvStatus {
  QPV_STATUS_OK = 0,
  QPV_STATUS_NULL_ARGUMENT = 1,
  QPV_STATUS_INVALID_UTF8 = 2,
  /**
   * Unparseable JSON, bad rational, unknown label or wrong shape.
   */
  QPV_STATUS_MALFORMED = 3,
  /**
   * The matrix violates QM1 or QM2.
   */
  QPV_STATUS_INVALID_SPACE = 4,
  /**
   * Well-formed input outside a theorem's hypotheses.
   */
  QPV_STATUS_PRECONDITION = 5,
  /**
   * The Takahashi hypothesis fails; the output holds the witness certificate.
   */
  QPV_STATUS_HYPOTHESIS_VIOLATED = 6,
  /**
   * A certificate did not re-verify; the output holds the report.
   */
  QPV_STATUS_VERIFY_FAILED = 7,
  /**
   * Internal contract broken. Always a bug.
   */
  QPV_STATUS_FAULT = 8,
  QPV_STATUS_PANIC = 9,
} QpvStatus;

/**
 * Opaque objective handle, tied to the space it was built against.
 */
typedef struct QpvObjective QpvObjective;

/**
 * Opaque space handle.
 */
typedef struct QpvSpace QpvSpace;

/**
 * Axiom flags of a raw matrix.
 */
typedef struct QpvValidation {
  bool qm1;
  bool qm2;
  bool qm3;
  bool t1;
} QpvValidation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a space from `{"points": [...], "d": [[...]]}`.
 *
 * # Safety
 * `json` is a nul-terminated string and `out` is writable.
 */
enum QpvStatus qpv_space_from_json(const char *json, struct QpvSpace **out);

/**
 * # Safety
 * `space` is null or came from [`qpv_space_from_json`] and is not yet freed.
 */
void qpv_space_free(struct QpvSpace *space);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `space` is null or a live handle.
 */
size_t qpv_space_len(const struct QpvSpace *space);

/**
 * Builds an objective from `{"phi": {label: value}}` against `space`.
 *
 * # Safety
 * `space` is a live handle, `json` a nul-terminated string, `out` writable.
 */
enum QpvStatus qpv_objective_from_json(const struct QpvSpace *space,
                                       const char *json,
                                       struct QpvObjective **out);

/**
 * # Safety
 * `phi` is null or came from [`qpv_objective_from_json`] and is not yet freed.
 */
void qpv_objective_free(struct QpvObjective *phi);

/**
 * Axiom flags of a space file whose matrix may be invalid.
 *
 * # Safety
 * `json` is a nul-terminated string and `out` is writable.
 */
enum QpvStatus qpv_validate(const char *json, struct QpvValidation *out);

/**
 * Weak Ekeland certificate as JSON.
 *
 * # Safety
 * Handles are live and `out` is writable.
 */
enum QpvStatus qpv_ekeland_weak(const struct QpvSpace *space,
                                const struct QpvObjective *phi,
                                char **out);

/**
 * Full Ekeland certificate. `eps` and `lambda` are rational strings such
 * as `"3/2"`; `x0` is a point label.
 *
 * # Safety
 * Handles are live, strings nul-terminated, `out` writable.
 */
enum QpvStatus qpv_ekeland_full(const struct QpvSpace *space,
                                const struct QpvObjective *phi,
                                const char *eps,
                                const char *lambda,
                                const char *x0,
                                char **out);

/**
 * Takahashi certificate. When the hypothesis fails the status is
 * `HypothesisViolated` and `out` still receives the witness certificate.
 *
 * # Safety
 * Handles are live and `out` is writable.
 */
enum QpvStatus qpv_takahashi(const struct QpvSpace *space,
                             const struct QpvObjective *phi,
                             char **out);

/**
 * Caristi certificate for a map given as `{label: label}` or
 * `{label: [labels]}`.
 *
 * # Safety
 * Handles are live, `map_json` nul-terminated, `out` writable.
 */
enum QpvStatus qpv_caristi(const struct QpvSpace *space,
                           const struct QpvObjective *phi,
                           const char *map_json,
                           char **out);

/**
 * Equivalence certificate.
 *
 * # Safety
 * Handles are live and `out` is writable.
 */
enum QpvStatus qpv_equivalence(const struct QpvSpace *space,
                               const struct QpvObjective *phi,
                               char **out);

/**
 * Re-checks a certificate. The report goes to `out` in both outcomes; the
 * status is `VerifyFailed` when any claim does not hold.
 *
 * # Safety
 * Handles are live, `certificate_json` nul-terminated, `out` writable.
 */
enum QpvStatus qpv_verify(const struct QpvSpace *space,
                          const struct QpvObjective *phi,
                          const char *certificate_json,
                          char **out);

/**
 * The incompleteness report truncated at `n >= 2` points.
 *
 * # Safety
 * `out` is writable.
 */
enum QpvStatus qpv_incomplete_demo(size_t n, char **out);

/**
 * Releases a string returned through an `out` parameter.
 *
 * # Safety
 * `s` is null or a string from this library that has not been freed.
 */
void qpv_string_free(char *s);

/**
 * Message for the last failing call on this thread, or null. The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *qpv_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPVAR_H */
