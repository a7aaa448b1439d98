#ifndef GONALITY_H
#define GONALITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Marker for an unbounded upper bound.
 */
#define GONALITY_UNBOUNDED UINT32_MAX

/**
 * Result codes of every fallible call.
 */
typedef enum {
  GONALITY_STATUS_OK = 0,
  GONALITY_STATUS_NULL_POINTER = 1,
  /**
   * an argument is outside the domain of the call
   */
  GONALITY_STATUS_INVALID_ARGUMENT = 2,
  GONALITY_STATUS_PARSE = 3,
  GONALITY_STATUS_CONTRADICTION = 4,
  GONALITY_STATUS_INCONSISTENT = 5,
  GONALITY_STATUS_IO = 6,
  GONALITY_STATUS_PANIC = 7,
} GonalityStatus;

/**
 * Opaque set of literature facts.
 */
typedef struct GonalityFactStore GonalityFactStore;

/**
 * Gonality interval of `X0(N)/w_d`. Unbounded uppers are `UINT32_MAX`.
 */
typedef struct {
  uint64_t genus;
  uint32_t lower_q;
  uint32_t upper_q;
  uint32_t lower_c;
  uint32_t upper_c;
  /**
   * both fields decided
   */
  bool decided;
} GonalityBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *gonality_last_error(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gonality_string_free(char *s);

/**
 * The fact store shipped with the library.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
GonalityStatus gonality_facts_shipped(GonalityFactStore **out);

/**
 * A store with no facts.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
GonalityStatus gonality_facts_empty(GonalityFactStore **out);

/**
 * Parse a fact file held in memory.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
GonalityStatus gonality_facts_parse(const char *text, GonalityFactStore **out);

/**
 * Load a fact file from disk.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
GonalityStatus gonality_facts_load(const char *path, GonalityFactStore **out);

/**
 * Number of facts in a store, 0 for NULL.
 *
 * # Safety
 * `store` must be NULL or a live handle.
 */
size_t gonality_facts_len(const GonalityFactStore *store);

/**
 * Release a store. NULL is ignored.
 *
 * # Safety
 * `store` must come from this library and not have been freed.
 */
void gonality_facts_free(GonalityFactStore *store);

/**
 * Genus of `X0(N)` (`d = 1`), `X0(N)/w_d` (`d2 = 0`) or `X0(N)/<w_d, w_d2>`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
GonalityStatus gonality_genus(uint64_t n, uint64_t d, uint64_t d2, uint64_t *out);

/**
 * `#X0(N)(F_{p^deg})` for `deg` in {1, 2}.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
GonalityStatus gonality_count_points(uint64_t n, uint64_t p, uint32_t deg, uint64_t *out);

/**
 * Trace of `T_m` on weight-2 cusp forms for `Gamma_0(N)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
GonalityStatus gonality_trace(uint64_t n, uint64_t m, int64_t *out);

/**
 * Gonality bounds of `X0(N)/w_d` under a fact store. When `certificate` is
 * not NULL it receives the certificate summary, to be released with
 * `gonality_string_free`.
 *
 * # Safety
 * `store` must be a live handle, `out` a valid pointer and `certificate`
 * NULL or a valid pointer.
 */
GonalityStatus gonality_classify(const GonalityFactStore *store,
                                 uint64_t n,
                                 uint64_t d,
                                 GonalityBounds *out,
                                 char **certificate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GONALITY_H */
