#ifndef HORN_LIMITS_H
#define HORN_LIMITS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HlStatus {
  HL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HL_STATUS_NULL_ARGUMENT = 1,
  /**
   * Input text was not valid UTF-8.
   */
  HL_STATUS_INVALID_UTF8 = 2,
  /**
   * Program, atom, interpretation or schema text failed to parse.
   */
  HL_STATUS_PARSE = 3,
  /**
   * The operation needs a program that passes the guard checks.
   */
  HL_STATUS_UNCERTIFIED = 4,
  /**
   * A numeric argument or input combination was rejected.
   */
  HL_STATUS_INVALID_ARGUMENT = 5,
  /**
   * A panic was caught at the boundary.
   */
  HL_STATUS_INTERNAL = 6,
} HlStatus;

/**
 * Opaque parsed program.
 */
typedef struct HlProgram HlProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses program text. On success `*out` owns a handle to free with
 * [`hl_program_free`].
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HlStatus hl_program_parse(const char *source, struct HlProgram **out);

/**
 * # Safety
 * `program` must be null or a handle from [`hl_program_parse`] not yet freed.
 */
void hl_program_free(struct HlProgram *program);

/**
 * Number of distinct clauses, or 0 for a null handle.
 *
 * # Safety
 * `program` must be null or a live handle.
 */
size_t hl_program_clause_count(const struct HlProgram *program);

/**
 * Runs the guard checks. `*certified` is set to whether every clause passes
 * both; `*report_json` (if non-null) receives the per-clause report.
 *
 * # Safety
 * `program` must be a live handle, `certified` writable, and `report_json`
 * null or writable.
 */
enum HlStatus hl_guard_check(const struct HlProgram *program, bool *certified, char **report_json);

/**
 * Least model restricted to levels `<= depth`, one atom per line in
 * canonical order.
 *
 * # Safety
 * `program` must be a live handle and `out` writable.
 */
enum HlStatus hl_least_model(const struct HlProgram *program, uint32_t depth, char **out);

/**
 * Decides membership of a ground atom. `*member` is set on success and
 * `*proof_json` (if non-null) receives the full verdict with proof tree.
 *
 * # Safety
 * `program` must be a live handle, `query` NUL-terminated, `member`
 * writable and `proof_json` null or writable.
 */
enum HlStatus hl_decide(const struct HlProgram *program,
                        const char *query,
                        bool *member,
                        char **proof_json);

/**
 * Distance between two interpretations given as text, written as `0`,
 * `2^-n` or `<=2^-n`.
 *
 * # Safety
 * Both inputs must be NUL-terminated and `out` writable.
 */
enum HlStatus hl_distance(const char *i, const char *j, char **out);

/**
 * Clause limits of a sequence schema (JSON) and, when the limit exists,
 * the comparison of least models at `depth` over indices `1..=horizon`.
 *
 * # Safety
 * `schema_json` must be NUL-terminated and `out` writable.
 */
enum HlStatus hl_limit_report(const char *schema_json,
                              uint32_t depth,
                              uint64_t horizon,
                              char **out);

/**
 * Probes the bounded least model at `depth` with every single-atom
 * perturbation whose level lies in `level_lo..=level_hi`, using
 * `epsilon = 2^-eps_exponent`. Writes the JSON report.
 *
 * # Safety
 * `program` must be a live handle and `out` writable.
 */
enum HlStatus hl_stability(const struct HlProgram *program,
                           uint32_t eps_exponent,
                           uint32_t level_lo,
                           uint32_t level_hi,
                           uint32_t steps,
                           uint32_t depth,
                           char **out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *hl_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void hl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HORN_LIMITS_H */
