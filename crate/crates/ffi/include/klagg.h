#ifndef KLAGG_H
#define KLAGG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum KlaggStatus {
  KLAGG_STATUS_OK = 0,
  KLAGG_STATUS_NULL_POINTER = 1,
  KLAGG_STATUS_INVALID_INPUT = 2,
  KLAGG_STATUS_TOO_LARGE = 3,
  KLAGG_STATUS_BUFFER_TOO_SMALL = 4,
  KLAGG_STATUS_INTERNAL = 5,
  KLAGG_STATUS_PANIC = 6,
} KlaggStatus;

typedef enum KlaggMode {
  /**
   * Plain first-fit; may leave bins empty.
   */
  KLAGG_MODE_PAPER = 0,
  /**
   * First-fit that keeps every bin non-empty.
   */
  KLAGG_MODE_STRICT = 1,
} KlaggMode;

typedef enum KlaggEngine {
  KLAGG_ENGINE_NAIVE = 0,
  KLAGG_ENGINE_TREE = 1,
} KlaggEngine;

typedef enum KlaggPairing {
  /**
   * Bin masses sorted descending against the head of `p`.
   */
  KLAGG_PAIRING_SORTED = 0,
  /**
   * Bin `i` paired with the `i`-th largest component of `p`.
   */
  KLAGG_PAIRING_BIN_INDEX = 1,
} KlaggPairing;

/**
 * The result of an aggregation.
 */
typedef struct KlaggAggregation KlaggAggregation;

/**
 * A validated distribution, stored sorted in non-increasing order.
 */
typedef struct KlaggDistribution KlaggDistribution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *klagg_last_error_message(void);

/**
 * Validates `len` probabilities and stores a new handle in `*out`.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum KlaggStatus klagg_distribution_new(const double *values,
                                        size_t len,
                                        struct KlaggDistribution **out);

/**
 * # Safety
 * `dist` must be NULL or a handle from this library that was not yet freed.
 */
void klagg_distribution_free(struct KlaggDistribution *dist);

/**
 * Number of components, or 0 for a NULL handle.
 *
 * # Safety
 * `dist` must be NULL or a live handle.
 */
size_t klagg_distribution_len(const struct KlaggDistribution *dist);

/**
 * Copies the sorted probabilities into `out`.
 *
 * `*written` (if not NULL) receives the number of entries required.
 *
 * # Safety
 * `dist` must be a live handle and `out` must hold `cap` doubles.
 */
enum KlaggStatus klagg_distribution_probs(const struct KlaggDistribution *dist,
                                          double *out,
                                          size_t cap,
                                          size_t *written);

/**
 * Greedy aggregation into `m` blocks.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum KlaggStatus klagg_reduce_greedy(const struct KlaggDistribution *dist,
                                     size_t m,
                                     enum KlaggMode mode,
                                     enum KlaggEngine engine,
                                     struct KlaggAggregation **out);

/**
 * Optimal aggregation by exhaustive search.
 *
 * Fails with `TOO_LARGE` above 14 components unless `force` is set.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum KlaggStatus klagg_reduce_exact(const struct KlaggDistribution *dist,
                                    size_t m,
                                    bool force,
                                    struct KlaggAggregation **out);

/**
 * # Safety
 * `agg` must be NULL or a handle from this library that was not yet freed.
 */
void klagg_aggregation_free(struct KlaggAggregation *agg);

/**
 * Number of blocks, or 0 for a NULL handle.
 *
 * # Safety
 * `agg` must be NULL or a live handle.
 */
size_t klagg_aggregation_m(const struct KlaggAggregation *agg);

/**
 * `D(q || p)` in bits under the given pairing, or NaN for a NULL handle.
 *
 * # Safety
 * `agg` must be NULL or a live handle.
 */
double klagg_aggregation_divergence(const struct KlaggAggregation *agg, enum KlaggPairing pairing);

/**
 * Copies the `m` block masses into `out`.
 *
 * # Safety
 * `agg` must be a live handle and `out` must hold `cap` doubles.
 */
enum KlaggStatus klagg_aggregation_q(const struct KlaggAggregation *agg,
                                     double *out,
                                     size_t cap,
                                     size_t *written);

/**
 * Copies the block of every component, indexed in the caller's original
 * order, into `out` (`n` entries).
 *
 * # Safety
 * `agg` must be a live handle and `out` must hold `cap` entries.
 */
enum KlaggStatus klagg_aggregation_blocks(const struct KlaggAggregation *agg,
                                          size_t *out,
                                          size_t cap,
                                          size_t *written);

/**
 * `-log2` of the mass of the `m` largest components.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum KlaggStatus klagg_lower_bound_bits(const struct KlaggDistribution *dist,
                                        size_t m,
                                        double *out);

/**
 * `D(q || p)` in bits for two vectors of length `len`.
 *
 * # Safety
 * `q` and `p` must each point to `len` doubles; `out` must be writable.
 */
enum KlaggStatus klagg_relative_entropy(const double *q, const double *p, size_t len, double *out);

/**
 * Encodes a 3-Partition instance (`3m` positive integers summing to `m *
 * target`) as a distribution.
 *
 * # Safety
 * `values` must point to `len` integers; `out` must be writable.
 */
enum KlaggStatus klagg_encode_3partition(const int64_t *values,
                                         size_t len,
                                         size_t m,
                                         int64_t target,
                                         struct KlaggDistribution **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KLAGG_H */
