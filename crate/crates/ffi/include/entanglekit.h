#ifndef ENTANGLEKIT_H
#define ENTANGLEKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum EkStatus {
  EK_STATUS_OK = 0,
  EK_STATUS_INVALID_ARGUMENT = 1,
  EK_STATUS_PARSE = 2,
  EK_STATUS_PRECONDITION = 3,
  EK_STATUS_CAPACITY = 4,
  EK_STATUS_NUMERIC = 5,
  EK_STATUS_IO = 6,
  EK_STATUS_NULL_POINTER = 7,
  EK_STATUS_PANIC = 8,
} EkStatus;

/**
 * Dataset handle.
 */
typedef struct EkDataset EkDataset;

/**
 * Tree tensor network handle.
 */
typedef struct EkNetwork EkNetwork;

/**
 * Dense tensor handle.
 */
typedef struct EkTensor EkTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *ek_last_error(void);

/**
 * Creates a tensor from row-major data.
 */
enum EkStatus ek_tensor_new(const size_t *dims,
                            size_t ndim,
                            const double *data,
                            size_t len,
                            struct EkTensor **result);

/**
 * Reads a tensor from the binary tensor format.
 */
enum EkStatus ek_tensor_read(const char *file, struct EkTensor **result);

enum EkStatus ek_tensor_write(const struct EkTensor *tensor, const char *file);

/**
 * Number of axes; 0 for a null handle.
 */
size_t ek_tensor_ndim(const struct EkTensor *tensor);

enum EkStatus ek_tensor_norm(const struct EkTensor *tensor, double *result);

/**
 * Copies the row-major entries into `buffer`, which must hold exactly the tensor's size.
 */
enum EkStatus ek_tensor_data(const struct EkTensor *tensor, double *buffer, size_t len);

/**
 * Entanglement (nats) of the tensor with respect to the axis subset.
 */
enum EkStatus ek_tensor_entanglement(const struct EkTensor *tensor,
                                     const size_t *subset,
                                     size_t subset_len,
                                     double *result);

void ek_tensor_free(struct EkTensor *tensor);

/**
 * Creates a dataset from `features[(m * n_features + n) * feature_dim + d]`. `labels` may be
 * null for an unlabeled dataset; otherwise it holds one ±1 value per instance.
 */
enum EkStatus ek_dataset_new(size_t n_features,
                             size_t feature_dim,
                             size_t spatial_dim,
                             const double *features,
                             size_t len,
                             const double *labels,
                             size_t n_labels,
                             struct EkDataset **result);

/**
 * Reads a dataset CSV together with its `.json` sidecar.
 */
enum EkStatus ek_dataset_read(const char *csv, struct EkDataset **result);

size_t ek_dataset_n_features(const struct EkDataset *ds);

/**
 * New dataset with every scalar replaced by its sine-cosine embedding.
 */
enum EkStatus ek_dataset_embed_sincos(const struct EkDataset *ds,
                                      double theta,
                                      struct EkDataset **result);

/**
 * Entanglement of the empirical data tensor for a subset of feature indices.
 */
enum EkStatus ek_dataset_entanglement(const struct EkDataset *ds,
                                      const size_t *subset,
                                      size_t subset_len,
                                      double *result);

/**
 * Mean entanglement over canonical partitions at levels `lo..=hi`.
 */
enum EkStatus ek_dataset_average_entanglement(const struct EkDataset *ds,
                                              uint32_t lo,
                                              uint32_t hi,
                                              double *result);

/**
 * Sum of multivariate Pearson correlations across the feature bipartition.
 */
enum EkStatus ek_dataset_surrogate_entanglement(const struct EkDataset *ds,
                                                const size_t *subset,
                                                size_t subset_len,
                                                double *result);

/**
 * Rearranges features; writes the target position of every feature into `pi`, which must
 * have one slot per feature.
 */
enum EkStatus ek_dataset_rearrange(const struct EkDataset *ds,
                                   uint64_t seed,
                                   size_t restarts,
                                   size_t *pi,
                                   size_t pi_len);

void ek_dataset_free(struct EkDataset *ds);

/**
 * Fits a width-`width` tree network to a tensor whose axes form a `dim`-dimensional grid.
 * `achieved_error` may be null.
 */
enum EkStatus ek_network_fit(const struct EkTensor *tensor,
                             size_t width,
                             size_t dim,
                             struct EkNetwork **result,
                             double *achieved_error);

/**
 * Inner product of the network with `x_1 (x) .. (x) x_n`; `inputs` concatenates the vectors
 * in axis order.
 */
enum EkStatus ek_network_forward(const struct EkNetwork *net,
                                 const double *inputs,
                                 size_t len,
                                 double *result);

/**
 * Contracts the network into a dense tensor.
 */
enum EkStatus ek_network_contract(const struct EkNetwork *net, struct EkTensor **result);

void ek_network_free(struct EkNetwork *net);

/**
 * Training-set size bound; see the library documentation for the formula.
 */
enum EkStatus ek_sample_size_bound(double delta,
                                   double gamma,
                                   double pop_norm_lower,
                                   double max_log_dim,
                                   uint64_t *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTANGLEKIT_H */
