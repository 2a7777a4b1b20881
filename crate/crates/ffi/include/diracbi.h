#ifndef DIRACBI_H
#define DIRACBI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum DiracbiStatus {
  DIRACBI_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  DIRACBI_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not UTF-8.
   */
  DIRACBI_STATUS_INVALID_UTF8 = 2,
  /**
   * An expression failed to parse.
   */
  DIRACBI_STATUS_SYNTAX = 3,
  /**
   * Shapes of declared objects disagree.
   */
  DIRACBI_STATUS_SHAPE = 4,
  /**
   * The instance text is ill-formed; the message carries line and column.
   */
  DIRACBI_STATUS_INSTANCE = 5,
  /**
   * Inputs violate a precondition, or nothing applies.
   */
  DIRACBI_STATUS_PRECONDITION = 6,
  /**
   * Unknown suite or preset name.
   */
  DIRACBI_STATUS_UNKNOWN_NAME = 7,
  /**
   * A frame or certificate lost rank.
   */
  DIRACBI_STATUS_RANK_DROP = 8,
  /**
   * Arithmetic failure: division by zero or a pole.
   */
  DIRACBI_STATUS_ARITHMETIC = 9,
  /**
   * The library panicked; this is a bug.
   */
  DIRACBI_STATUS_PANIC = 10,
} DiracbiStatus;

/**
 * A validated instance file.
 */
typedef struct DiracbiInstance DiracbiInstance;

/**
 * The report of a check suite.
 */
typedef struct DiracbiReport DiracbiReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failing call on this thread, or null. The
 * pointer stays valid until the next failing call on the thread.
 */
const char *diracbi_last_error(void);

/**
 * The library version as a static string.
 */
const char *diracbi_version(void);

/**
 * Parses instance text. `file` names the source in diagnostics and may be
 * null.
 *
 * # Safety
 * `text` and `file` must be null or nul-terminated strings; `out` must be
 * a valid pointer.
 */
enum DiracbiStatus diracbi_instance_parse(const char *text,
                                          const char *file,
                                          struct DiracbiInstance **out);

/**
 * Releases an instance; null is ignored.
 *
 * # Safety
 * `inst` must be null or a handle from [`diracbi_instance_parse`] that was
 * not yet released.
 */
void diracbi_instance_free(struct DiracbiInstance *inst);

/**
 * Instance text of a named example.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be a valid pointer.
 */
enum DiracbiStatus diracbi_zoo_emit(const char *name, char **out);

/**
 * Runs a check suite with the given seed, trial count and degree bound.
 *
 * # Safety
 * `inst` must be a live handle, `suite` a nul-terminated string and `out`
 * a valid pointer.
 */
enum DiracbiStatus diracbi_check(const struct DiracbiInstance *inst,
                                 const char *suite,
                                 uint64_t seed,
                                 size_t trials,
                                 uint32_t max_degree,
                                 struct DiracbiReport **out);

/**
 * 1 when every check passed, 0 otherwise, -1 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int diracbi_report_passed(const struct DiracbiReport *report);

/**
 * Number of checks in the report; 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t diracbi_report_len(const struct DiracbiReport *report);

/**
 * The report as JSON, or as text when `text` is nonzero; release with
 * [`diracbi_string_free`]. Null for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *diracbi_report_render(const struct DiracbiReport *report, int text);

/**
 * Releases a report; null is ignored.
 *
 * # Safety
 * `report` must be null or a handle from [`diracbi_check`] that was not
 * yet released.
 */
void diracbi_report_free(struct DiracbiReport *report);

/**
 * Releases a string returned by the library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library that was not yet
 * released.
 */
void diracbi_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRACBI_H */
