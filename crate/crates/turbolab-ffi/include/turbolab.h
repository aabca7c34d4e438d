#ifndef TURBOLAB_H
#define TURBOLAB_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_INVALID_ARGUMENT = 1,
  TL_STATUS_PARSE_ERROR = 2,
  TL_STATUS_BUDGET_EXCEEDED = 3,
  TL_STATUS_CHECK_FAILED = 4,
  TL_STATUS_INTERNAL = 5,
} TlStatus;

/**
 * Verdicts of the sublogarithmic growth inequality.
 */
typedef enum TlLlogVerdict {
  TL_LLOG_VERDICT_HOLDS = 0,
  TL_LLOG_VERDICT_FAILS = 1,
  TL_LLOG_VERDICT_NOT_APPLICABLE = 2,
} TlLlogVerdict;

/**
 * An opaque loaded encoder (seed morphism plus an optional block view).
 */
typedef struct TlEncoder TlEncoder;

/**
 * Basic shape of an encoder.
 */
typedef struct TlEncoderInfo {
  uint8_t letter_dim;
  uintptr_t n;
  uintptr_t k;
  uintptr_t s;
  uintptr_t m;
  /**
   * Nonzero when the encoder is memoryless and usable as an outer block.
   */
  uint8_t has_block_view;
} TlEncoderInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The last error message raised on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *tl_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `tl_*` call and not yet
 * freed.
 */
void tl_string_free(char *s);

/**
 * Parse an encoder from JSON spec text (same schema as the CLI files).
 * On success writes a handle to `out`; release it with [`tl_encoder_free`].
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum TlStatus tl_encoder_from_json(const char *json, struct TlEncoder **out);

/**
 * Release an encoder handle.
 *
 * # Safety
 * `h` must come from [`tl_encoder_from_json`] and not be freed twice.
 */
void tl_encoder_free(struct TlEncoder *h);

/**
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum TlStatus tl_encoder_info(const struct TlEncoder *h, struct TlEncoderInfo *out);

/**
 * Classification report as JSON (recursive / totally recursive /
 * systematic verdicts, speed, memory split sizes).
 *
 * # Safety
 * `h` and `out_json` must be valid pointers.
 */
enum TlStatus tl_classify_json(const struct TlEncoder *h, uintptr_t n_falsify, char **out_json);

/**
 * Exact distances of a memoryless encoder. Infinite distances come back
 * as `UINT64_MAX`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum TlStatus tl_distances(const struct TlEncoder *h, uint64_t *out_d_c, uint64_t *out_d_q);

/**
 * Exact convolutional spectrum of a seed encoder as CSV (`w,d,count`).
 *
 * # Safety
 * `h` and `out_csv` must be valid pointers.
 */
enum TlStatus tl_inner_spectrum_csv(const struct TlEncoder *h,
                                    uintptr_t n_steps,
                                    uintptr_t w_max,
                                    uint64_t d_max,
                                    uint8_t cumulative,
                                    char **out_csv);

/**
 * Exact distance of a turbo instance with a sampled interleaver
 * (`interleaver_seed`; pass the same seed to reproduce a trial).
 *
 * # Safety
 * All pointers must be valid.
 */
enum TlStatus tl_turbo_distance(const struct TlEncoder *outer,
                                const struct TlEncoder *inner,
                                uintptr_t n_blocks,
                                uint64_t interleaver_seed,
                                uint64_t *out_d_c);

/**
 * Monte Carlo distance summary over random interleavers, as JSON.
 *
 * # Safety
 * All pointers must be valid.
 */
enum TlStatus tl_mc_summary_json(const struct TlEncoder *outer,
                                 const struct TlEncoder *inner,
                                 uintptr_t n_blocks,
                                 uintptr_t trials,
                                 uint64_t master_seed,
                                 char **out_json);

/**
 * Check `(t llog N)^(t llog N) <= N^t` for `t = t_num / t_den`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TlStatus tl_llog_check(uint64_t t_num, uint64_t t_den, uint64_t n, enum TlLlogVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TURBOLAB_H */
