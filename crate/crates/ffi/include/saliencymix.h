#ifndef SALIENCYMIX_H
#define SALIENCYMIX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_ARGUMENT = 2,
  SM_STATUS_UNSUPPORTED_FORMAT = 3,
  SM_STATUS_SHAPE = 4,
  SM_STATUS_NUMERIC_DOMAIN = 5,
  SM_STATUS_MISSING_INPUT = 6,
  SM_STATUS_EMPTY_INPUT = 7,
  SM_STATUS_IO = 8,
  SM_STATUS_PANIC = 99,
} SmStatus;

typedef enum SmScheme {
  SM_SCHEME_SAL2CORR = 0,
  SM_SCHEME_SAL2SAL = 1,
  SM_SCHEME_SAL2NONSAL = 2,
  SM_SCHEME_NONSAL2SAL = 3,
  SM_SCHEME_NONSAL2NONSAL = 4,
} SmScheme;

typedef enum SmMethod {
  SM_METHOD_FINE_GRAINED = 0,
  SM_METHOD_SPECTRAL_RESIDUAL = 1,
  SM_METHOD_FREQUENCY_TUNED = 2,
} SmMethod;

typedef enum SmPairing {
  SM_PAIRING_RANDOM = 0,
  SM_PAIRING_PERMUTATION = 1,
} SmPairing;

/**
 * Augmentation settings. Create with [`sm_augmenter_new`].
 */
typedef struct SmAugmenter SmAugmenter;

/**
 * Output of [`sm_augment_batch`].
 */
typedef struct SmBatch SmBatch;

typedef struct SmRect {
  size_t x;
  size_t y;
  size_t w;
  size_t h;
} SmRect;

/**
 * Mirrors one manifest line; item ids are batch indices.
 */
typedef struct SmPlanRecord {
  uint64_t index;
  uint64_t source_index;
  uint64_t target_index;
  double lambda_raw;
  double lambda_eff;
  struct SmRect src_rect;
  struct SmRect tgt_rect;
  enum SmScheme scheme;
  enum SmMethod method;
  uint64_t seed;
  /**
   * False when the sample passed through unmixed.
   */
  bool applied;
} SmPlanRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next `sm_*` call on the same thread.
 */
const char *sm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sm_version(void);

/**
 * Computes a saliency map of `width * height` doubles into `out`.
 *
 * `pixels` holds `height` rows of `width` pixels with `channels` interleaved
 * 8-bit samples (`len` bytes in total). `method` is an [`SmMethod`] value.
 *
 * # Safety
 * `pixels` must point to `len` readable bytes and `out` to `out_len`
 * writable doubles.
 */
enum SmStatus sm_detect(const uint8_t *pixels,
                        size_t len,
                        size_t width,
                        size_t height,
                        size_t channels,
                        uint32_t method,
                        double *out,
                        size_t out_len);

/**
 * Creates an augmenter with random pairing and apply probability 1.
 * `scheme` and `method` are [`SmScheme`] / [`SmMethod`] values.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to release
 * with [`sm_augmenter_free`].
 */
enum SmStatus sm_augmenter_new(uint32_t scheme,
                               uint32_t method,
                               uint64_t seed,
                               struct SmAugmenter **out);

/**
 * # Safety
 * `aug` must come from [`sm_augmenter_new`] and not be freed.
 */
enum SmStatus sm_augmenter_set_pairing(struct SmAugmenter *aug, uint32_t pairing);

/**
 * Probability in [0, 1] that a sample is mixed rather than passed through.
 *
 * # Safety
 * `aug` must come from [`sm_augmenter_new`] and not be freed.
 */
enum SmStatus sm_augmenter_set_apply_probability(struct SmAugmenter *aug, double probability);

/**
 * # Safety
 * `aug` must come from [`sm_augmenter_new`] and not be freed.
 */
enum SmStatus sm_augmenter_set_threads(struct SmAugmenter *aug, size_t threads);

/**
 * # Safety
 * `aug` must be null or come from [`sm_augmenter_new`]; it is invalid afterwards.
 */
void sm_augmenter_free(struct SmAugmenter *aug);

/**
 * Augments a packed `count x height x width x channels` batch, producing one
 * sample per input element (sample `k` uses the core's per-index draws).
 *
 * # Safety
 * `images` must point to `images_len` readable bytes, `labels` to `count`
 * readable values, and `out` must be valid. On success `*out` receives a
 * handle to release with [`sm_batch_free`].
 */
enum SmStatus sm_augment_batch(const struct SmAugmenter *aug,
                               const uint8_t *images,
                               size_t images_len,
                               size_t count,
                               size_t height,
                               size_t width,
                               size_t channels,
                               const uint32_t *labels,
                               size_t class_count,
                               struct SmBatch **out);

/**
 * Number of samples in the batch (0 for a null handle).
 *
 * # Safety
 * `batch` must be null or a live handle.
 */
size_t sm_batch_len(const struct SmBatch *batch);

/**
 * Mixed images, packed like the input. Borrowed; valid until [`sm_batch_free`].
 *
 * # Safety
 * `batch` must be a live handle; `len` may be null.
 */
const uint8_t *sm_batch_images(const struct SmBatch *batch, size_t *len);

/**
 * Row-major `count x class_count` soft labels. Borrowed; valid until [`sm_batch_free`].
 *
 * # Safety
 * `batch` must be a live handle; `len` may be null.
 */
const double *sm_batch_labels(const struct SmBatch *batch, size_t *len);

/**
 * Copies the plan of sample `index` into `out`.
 *
 * # Safety
 * `batch` must be a live handle and `out` valid for writing.
 */
enum SmStatus sm_batch_plan(const struct SmBatch *batch, size_t index, struct SmPlanRecord *out);

/**
 * The plan of sample `index` as one manifest line (no trailing newline),
 * byte-identical to what the CLI writes. Free with [`sm_string_free`].
 *
 * # Safety
 * `batch` must be a live handle and `out` valid for writing.
 */
enum SmStatus sm_batch_manifest_line(const struct SmBatch *batch, size_t index, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void sm_string_free(char *s);

/**
 * # Safety
 * `batch` must be null or a live handle; it is invalid afterwards.
 */
void sm_batch_free(struct SmBatch *batch);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SALIENCYMIX_H */
