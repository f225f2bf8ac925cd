#ifndef QUBO_ARENA_H
#define QUBO_ARENA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QaStatus {
  QA_STATUS_OK = 0,
  QA_STATUS_NULL_POINTER = 1,
  QA_STATUS_INVALID_ARGUMENT = 2,
  QA_STATUS_DIMENSION = 3,
  QA_STATUS_PARSE = 4,
  QA_STATUS_CAPACITY = 5,
  QA_STATUS_IO = 6,
  QA_STATUS_INTERNAL = 7,
} QaStatus;

/**
 * Opaque QUBO problem.
 */
typedef struct QaQubo QaQubo;

/**
 * Opaque solver result.
 */
typedef struct QaRun QaRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *qa_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qa_version(void);

/**
 * Parses an instance in the text format used by `qubo-arena gen`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum QaStatus qa_qubo_parse(const char *text, struct QaQubo **out);

/**
 * Builds a problem from parallel arrays of `(i, j, q)` triplets. Pairs with
 * `j < i` are mirrored and repeated pairs are summed.
 *
 * # Safety
 * `is`, `js` and `qs` must each hold `len` elements; `out` must be writable.
 */
enum QaStatus qa_qubo_from_entries(size_t n,
                                   const uint32_t *is,
                                   const uint32_t *js,
                                   const double *qs,
                                   size_t len,
                                   double offset,
                                   struct QaQubo **out);

/**
 * Random NAE 3-SAT instance with `n` variables and `m` clauses, QUBO form.
 *
 * # Safety
 * `out` must be writable.
 */
enum QaStatus qa_gen_nae3sat(size_t n, size_t m, uint64_t seed, struct QaQubo **out);

/**
 * Sherrington-Kirkpatrick instance on `n` spins, QUBO form.
 *
 * # Safety
 * `out` must be writable.
 */
enum QaStatus qa_gen_sk(size_t n, uint64_t seed, struct QaQubo **out);

/**
 * Number of variables, or 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
size_t qa_qubo_num_vars(const struct QaQubo *p);

/**
 * Energy of a 0/1 assignment of length `len`.
 *
 * # Safety
 * `p` must be a live handle, `x` must hold `len` bytes, `out` must be writable.
 */
enum QaStatus qa_qubo_energy(const struct QaQubo *p, const uint8_t *x, size_t len, double *out);

/**
 * Energy change from flipping bit `k` of `x`.
 *
 * # Safety
 * As for [`qa_qubo_energy`].
 */
enum QaStatus qa_qubo_flip_delta(const struct QaQubo *p,
                                 const uint8_t *x,
                                 size_t len,
                                 size_t k,
                                 double *out);

/**
 * Serialises the problem; free the string with [`qa_string_free`].
 *
 * # Safety
 * `p` must be a live handle; `name` may be NULL; `out` must be writable.
 */
enum QaStatus qa_qubo_write(const struct QaQubo *p, const char *name, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void qa_string_free(char *s);

/**
 * # Safety
 * `p` must be NULL or a handle not freed before.
 */
void qa_qubo_free(struct QaQubo *p);

/**
 * Runs a solver (`"sa"`, `"pt"`, `"sb"` or `"exact"`).
 *
 * `params` is NULL or `"key=value;key=value"`. A non-positive `time_limit`
 * and a zero `sweep_limit` mean "unset"; heuristics need at least one.
 * The trajectory is always recorded.
 *
 * # Safety
 * `p` must be a live handle, strings NUL-terminated, `out` writable.
 */
enum QaStatus qa_solve(const struct QaQubo *p,
                       const char *solver,
                       const char *params,
                       double time_limit,
                       uint64_t sweep_limit,
                       uint64_t seed,
                       struct QaRun **out);

/**
 * Best energy, or NaN for NULL.
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
double qa_run_energy(const struct QaRun *r);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
size_t qa_run_num_vars(const struct QaRun *r);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
uint64_t qa_run_sweeps(const struct QaRun *r);

/**
 * Wall-clock seconds spent in the solver, or NaN for NULL.
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
double qa_run_elapsed(const struct QaRun *r);

/**
 * Copies the best assignment into `buf` (`len` must be at least the variable count).
 *
 * # Safety
 * `r` must be a live handle and `buf` writable for `len` bytes.
 */
enum QaStatus qa_run_assignment(const struct QaRun *r, uint8_t *buf, size_t len);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
size_t qa_run_trajectory_len(const struct QaRun *r);

/**
 * Copies the (elapsed, best energy) trajectory into two arrays of `len`.
 *
 * # Safety
 * `r` must be a live handle; both buffers writable for `len` values.
 */
enum QaStatus qa_run_trajectory(const struct QaRun *r, double *elapsed, double *energy, size_t len);

/**
 * # Safety
 * `r` must be NULL or a handle not freed before.
 */
void qa_run_free(struct QaRun *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUBO_ARENA_H */
