#ifndef FLINGO_H
#define FLINGO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The non-zero values match the exit codes of the `flingo`
 * command where both exist.
 */
typedef enum FlingoStatus {
  FLINGO_STATUS_OK = 0,
  /**
   * Parse, validation or translation error.
   */
  FLINGO_STATUS_INVALID = 1,
  /**
   * The reference solver's search-space estimate exceeded the budget.
   */
  FLINGO_STATUS_BUDGET = 2,
  /**
   * An internal invariant failed.
   */
  FLINGO_STATUS_INTERNAL = 3,
  /**
   * A required pointer argument was null.
   */
  FLINGO_STATUS_NULL_ARGUMENT = 4,
  /**
   * Input text was not valid UTF-8.
   */
  FLINGO_STATUS_INVALID_UTF8 = 5,
  /**
   * The translation disagrees with the reference semantics.
   */
  FLINGO_STATUS_MISMATCH = 6,
  /**
   * The program has no stable model.
   */
  FLINGO_STATUS_UNSATISFIABLE = 20,
} FlingoStatus;

/**
 * A parsed ground program.
 */
typedef struct FlingoProgram FlingoProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a ground program. On success `*out` receives a handle to release
 * with [`flingo_program_free`].
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FlingoStatus flingo_program_parse(const char *text, struct FlingoProgram **out);

/**
 * Releases a program handle. Null is ignored.
 *
 * # Safety
 * `p` must come from [`flingo_program_parse`] and not have been freed.
 */
void flingo_program_free(struct FlingoProgram *p);

/**
 * Number of rules in the program, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live program handle.
 */
size_t flingo_program_rule_count(const struct FlingoProgram *p);

/**
 * Writes the canonical text of the program to `*out`.
 *
 * # Safety
 * `p` must be a live program handle and `out` a valid pointer.
 */
enum FlingoStatus flingo_program_render(const struct FlingoProgram *p, char **out);

/**
 * Translates the program and writes clingcon input to `*out`.
 *
 * # Safety
 * `p` must be a live program handle and `out` a valid pointer.
 */
enum FlingoStatus flingo_translate(const struct FlingoProgram *p,
                                   int64_t min_int,
                                   int64_t max_int,
                                   char **out);

/**
 * Enumerates stable models with the reference solver and writes them to
 * `*out` as a JSON array of `{"props": [...], "ints": {...}}` objects.
 * `max_models` 0 means all; `budget` 0 or less means the default budget.
 * Returns [`FlingoStatus::Unsatisfiable`] (with `[]` written) when there is
 * no model.
 *
 * # Safety
 * `p` must be a live program handle and `out` a valid pointer.
 */
enum FlingoStatus flingo_solve(const struct FlingoProgram *p,
                               int64_t min_int,
                               int64_t max_int,
                               size_t max_models,
                               double budget,
                               char **out);

/**
 * Compares the program's stable models with those of its translation.
 * Returns [`FlingoStatus::Mismatch`] when they differ. If `report` is not
 * null it receives a human-readable report.
 *
 * # Safety
 * `p` must be a live program handle; `report` must be null or valid.
 */
enum FlingoStatus flingo_check(const struct FlingoProgram *p,
                               int64_t min_int,
                               int64_t max_int,
                               char **report);

/**
 * The message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *flingo_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void flingo_string_free(char *s);

/**
 * The library version as a static string.
 */
const char *flingo_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLINGO_H */
