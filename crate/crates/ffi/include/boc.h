#ifndef BOC_H
#define BOC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BocStatus {
  BOC_STATUS_OK = 0,
  BOC_STATUS_NULL_POINTER = 1,
  BOC_STATUS_INVALID_ARGUMENT = 2,
  BOC_STATUS_NON_FINITE = 3,
  BOC_STATUS_SHAPE = 4,
  BOC_STATUS_LABEL_RANGE = 5,
  BOC_STATUS_IO = 6,
  BOC_STATUS_FORMAT = 7,
  BOC_STATUS_MISSING_LABELS = 8,
  BOC_STATUS_PANIC = 9,
} BocStatus;

/**
 * Per-row probe results.
 */
typedef struct BocBatch BocBatch;

/**
 * A validated logit matrix with optional labels.
 */
typedef struct BocDataset BocDataset;

/**
 * Outcome of one probe.
 */
typedef struct BocProbe {
  uint64_t trials;
  uint64_t wins;
  double p_val;
  double score;
  double p_dom;
  size_t top_class;
  double confidence;
} BocProbe;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *boc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *boc_version(void);

/**
 * Builds a dataset from a row-major `rows x cols` matrix. `labels` may be
 * null; otherwise it holds `rows` entries.
 *
 * # Safety
 * `logits` must point to `rows * cols` doubles and `labels`, when non-null,
 * to `rows` integers.
 */
enum BocStatus boc_dataset_new(const double *logits,
                               size_t rows,
                               size_t cols,
                               const int64_t *labels,
                               struct BocDataset **out);

/**
 * Loads a dataset from `.npy` or `.csv` files. `labels_path` may be null.
 *
 * # Safety
 * Paths must be null or NUL-terminated strings.
 */
enum BocStatus boc_dataset_load(const char *logits_path,
                                const char *labels_path,
                                struct BocDataset **out);

/**
 * # Safety
 * `dataset` must be null or a handle from this library not yet freed.
 */
void boc_dataset_free(struct BocDataset *dataset);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t boc_dataset_len(const struct BocDataset *dataset);

/**
 * Number of classes, or 0 for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t boc_dataset_num_classes(const struct BocDataset *dataset);

/**
 * Writes `softmax(z)` into `out`, which holds `n` doubles.
 *
 * # Safety
 * `z` and `out` must each point to `n` doubles.
 */
enum BocStatus boc_softmax(const double *z, size_t n, double *out);

/**
 * `Pr(X >= wins)` for `X ~ Binomial(trials, p)`.
 *
 * # Safety
 * `out` must point to a writable double.
 */
enum BocStatus boc_binomial_sf(uint64_t wins, uint64_t trials, double p, double *out);

/**
 * Seed-free probe of one logit vector.
 *
 * # Safety
 * `z` must point to `n` doubles and `out` to a writable [`BocProbe`].
 */
enum BocStatus boc_test_exact(const double *z, size_t n, uint64_t k, struct BocProbe *out);

/**
 * Sampled probe of one logit vector on stream `(seed, index)`; matches row
 * `index` of a batch run with the same seed.
 *
 * # Safety
 * `z` must point to `n` doubles and `out` to a writable [`BocProbe`].
 */
enum BocStatus boc_test_seeded(const double *z,
                               size_t n,
                               uint64_t k,
                               uint64_t seed,
                               uint64_t index,
                               struct BocProbe *out);

/**
 * Probes every row of `dataset`. `exact` selects the seed-free
 * mode.
 *
 * # Safety
 * `dataset` must be a live handle and `out` a writable pointer.
 */
enum BocStatus boc_batch_run(const struct BocDataset *dataset,
                             uint64_t k,
                             uint64_t seed,
                             bool exact,
                             struct BocBatch **out);

/**
 * # Safety
 * `batch` must be null or a live handle.
 */
size_t boc_batch_len(const struct BocBatch *batch);

/**
 * # Safety
 * `batch` must be a live handle and `out` a writable [`BocProbe`].
 */
enum BocStatus boc_batch_get(const struct BocBatch *batch, size_t index, struct BocProbe *out);

/**
 * # Safety
 * `batch` must be null or a handle from this library not yet freed.
 */
void boc_batch_free(struct BocBatch *batch);

/**
 * Expected calibration error over `bins` equal-width bins. `correct[i]` is
 * non-zero when sample `i` was classified correctly.
 *
 * # Safety
 * `scores` and `correct` must each point to `n` elements.
 */
enum BocStatus boc_ece(const double *scores,
                       const uint8_t *correct,
                       size_t n,
                       size_t bins,
                       double *out);

/**
 * AUROC with `pos` as the positive class; ties count one half.
 *
 * # Safety
 * `pos` and `neg` must point to `n_pos` and `n_neg` doubles.
 */
enum BocStatus boc_auroc(const double *pos,
                         size_t n_pos,
                         const double *neg,
                         size_t n_neg,
                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOC_H */
