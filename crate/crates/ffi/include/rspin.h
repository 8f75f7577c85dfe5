#ifndef RSPIN_H
#define RSPIN_H

/* Generated by cbindgen. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum RspinError {
  RSPIN_ERROR_OK = 0,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  RSPIN_ERROR_NULL_OR_INVALID_ARGUMENT = 1,
  /**
   * Bad spin, grading, list length or bracket shape.
   */
  RSPIN_ERROR_INVALID_INPUT = 2,
  /**
   * Solver could not pin down the value.
   */
  RSPIN_ERROR_UNDETERMINED = 3,
  /**
   * Cache file could not be read, parsed or written.
   */
  RSPIN_ERROR_CACHE = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  RSPIN_ERROR_INTERNAL = 5,
} RspinError;

/**
 * Why a returned value is what it is.
 */
typedef enum RspinValueStatus {
  RSPIN_VALUE_STATUS_COMPUTED = 0,
  RSPIN_VALUE_STATUS_DIMENSION_MISMATCH_ZERO = 1,
  RSPIN_VALUE_STATUS_VANISHING_AXIOM_ZERO = 2,
} RspinValueStatus;

/**
 * Opaque evaluation engine. Safe to share between threads.
 */
typedef struct RspinEngine RspinEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rspin_last_error(void);

/**
 * Library version as a static NUL terminated string.
 */
const char *rspin_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void rspin_string_free(char *s);

/**
 * Creates an engine. With a non-null `cache_path` the cache file is loaded
 * if it exists; a missing file starts an empty cache.
 *
 * # Safety
 * `cache_path` is null or a NUL terminated string; `out` is writable.
 */
enum RspinError rspin_engine_new(const char *cache_path, struct RspinEngine **out);

/**
 * Destroys an engine. Null is ignored.
 *
 * # Safety
 * `engine` must come from [`rspin_engine_new`] and not be used afterwards.
 */
void rspin_engine_free(struct RspinEngine *engine);

/**
 * Writes the engine's cache atomically to `path` if anything changed.
 *
 * # Safety
 * `engine` is a live handle and `path` a NUL terminated string.
 */
enum RspinError rspin_engine_save(const struct RspinEngine *engine, const char *path);

/**
 * Number of entries currently held in the engine's cache.
 *
 * # Safety
 * `engine` is a live handle or null (which yields 0).
 */
size_t rspin_engine_cache_len(const struct RspinEngine *engine);

/**
 * Genus-0 correlator with insertions `a[0..n]`.
 *
 * # Safety
 * `a` points to `n` integers; `out_value` is writable; `out_status` may be null.
 */
enum RspinError rspin_g0(const struct RspinEngine *engine,
                         int64_t r,
                         const int64_t *a,
                         size_t n,
                         char **out_value,
                         enum RspinValueStatus *out_status);

/**
 * Closed loop-sum formula. `extended` allows m up to r.
 *
 * # Safety
 * `x` points to `n` integers; `out_value` is writable.
 */
enum RspinError rspin_loop_sum(int64_t r,
                               int64_t m,
                               const int64_t *x,
                               size_t n,
                               bool extended,
                               char **out_value);

/**
 * One-psi genus-1 correlator B from its closed formula.
 *
 * # Safety
 * `a` points to `n` integers; `out_value` is writable; `out_status` may be null.
 */
enum RspinError rspin_b_value(int64_t r,
                              const int64_t *a,
                              size_t n,
                              char **out_value,
                              enum RspinValueStatus *out_status);

/**
 * B computed by reduction to genus-0 brackets.
 *
 * # Safety
 * As for [`rspin_b_value`], plus a live `engine`.
 */
enum RspinError rspin_b_value_trr(const struct RspinEngine *engine,
                                  int64_t r,
                                  const int64_t *a,
                                  size_t n,
                                  char **out_value,
                                  enum RspinValueStatus *out_status);

/**
 * Genus-1 DR bracket from the closed formula. `k` and `a` both have length `n`.
 *
 * # Safety
 * `k` and `a` point to `n` integers each; `out_value` is writable.
 */
enum RspinError rspin_dr1_closed(int64_t r,
                                 const int64_t *k,
                                 const int64_t *a,
                                 size_t n,
                                 char **out_value,
                                 enum RspinValueStatus *out_status);

/**
 * Genus-1 DR bracket solved from the linear relations alone.
 *
 * # Safety
 * As for [`rspin_dr1_closed`], plus a live `engine`.
 */
enum RspinError rspin_dr1_relational(const struct RspinEngine *engine,
                                     int64_t r,
                                     const int64_t *k,
                                     const int64_t *a,
                                     size_t n,
                                     char **out_value,
                                     enum RspinValueStatus *out_status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RSPIN_H */
