#ifndef DOPPLER_CLUSTER_H
#define DOPPLER_CLUSTER_H

/* Generated by cbindgen from doppler-cluster-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of a fallible call.
 */
typedef enum DopcStatus {
  DOPC_STATUS_OK = 0,
  DOPC_STATUS_NULL_POINTER = 1,
  DOPC_STATUS_INVALID_UTF8 = 2,
  DOPC_STATUS_INVALID_ARGUMENT = 3,
  DOPC_STATUS_IO_ERROR = 4,
  DOPC_STATUS_COMPUTE_ERROR = 5,
  DOPC_STATUS_PANIC = 6,
} DopcStatus;

/**
 * An owned fitted-clusterer handle.
 */
typedef struct DopcClusterModel DopcClusterModel;

/**
 * An owned dataset handle.
 */
typedef struct DopcDataset DopcDataset;

/**
 * An owned feature-matrix handle.
 */
typedef struct DopcFeatureMatrix DopcFeatureMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library as a static NUL-terminated string.
 */
const char *dopc_version(void);

/**
 * Message of the last failure on this thread (empty string if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *dopc_last_error_message(void);

/**
 * Frees a string produced by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned through a `char **` out
 * parameter of this library (or NULL), not yet freed.
 */
void dopc_string_free(char *s);

/**
 * Loads a dataset CSV. `layout` is `"vector6400"` or `"cube"`.
 *
 * # Safety
 * `path` and `layout` must be valid NUL-terminated strings; `out` must be a
 * valid pointer. On success `*out` owns the dataset and must be released
 * with [`dopc_dataset_free`].
 */
enum DopcStatus dopc_dataset_load(const char *path, const char *layout, struct DopcDataset **out);

/**
 * Generates the deterministic synthetic dataset.
 *
 * # Safety
 * `out` must be a valid pointer; release the handle with
 * [`dopc_dataset_free`].
 */
enum DopcStatus dopc_dataset_synthetic(uint32_t subjects,
                                       uint32_t reps,
                                       uint32_t activities,
                                       double noise,
                                       uint64_t seed,
                                       struct DopcDataset **out);

/**
 * Number of samples, or 0 for a null handle.
 */
size_t dopc_dataset_len(const struct DopcDataset *ds);

/**
 * Number of distinct subjects, or 0 for a null handle.
 */
size_t dopc_dataset_subjects(const struct DopcDataset *ds);

/**
 * Copies the 1-based activity labels into `out` (length `len >= sample
 * count`). Fails if any sample is unlabeled.
 *
 * # Safety
 * `out` must point to at least `len` writable u32 values.
 */
enum DopcStatus dopc_dataset_labels(const struct DopcDataset *ds, uint32_t *out, size_t len);

/**
 * Writes the dataset as CSV in the given layout.
 *
 * # Safety
 * `path` and `layout` must be valid NUL-terminated strings.
 */
enum DopcStatus dopc_dataset_save_csv(const struct DopcDataset *ds,
                                      const char *path,
                                      const char *layout);

/**
 * Releases a dataset handle.
 *
 * # Safety
 * `ds` must be a handle from this library (or NULL), not yet freed.
 */
void dopc_dataset_free(struct DopcDataset *ds);

/**
 * Fits an extractor on the whole dataset and transforms it. `extractor` is
 * one of `raw`, `local_dct`, `raw_dct`, `entropy`, `pca`, `pca2d`; `k` is
 * the cluster count driving the Dunn-scored patch/strategy searches.
 *
 * # Safety
 * `extractor` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. Release the handle with [`dopc_features_free`].
 */
enum DopcStatus dopc_extract_features(const struct DopcDataset *ds,
                                      const char *extractor,
                                      size_t k,
                                      uint64_t seed,
                                      struct DopcFeatureMatrix **out);

/**
 * Number of feature rows (samples), or 0 for a null handle.
 */
size_t dopc_features_rows(const struct DopcFeatureMatrix *fm);

/**
 * Number of feature columns, or 0 for a null handle.
 */
size_t dopc_features_cols(const struct DopcFeatureMatrix *fm);

/**
 * Copies the feature matrix row-major into `out` (length `len >=
 * rows * cols`).
 *
 * # Safety
 * `out` must point to at least `len` writable doubles.
 */
enum DopcStatus dopc_features_copy(const struct DopcFeatureMatrix *fm, double *out, size_t len);

/**
 * JSON sidecar describing the extractor, plan/strategy, and seed.
 *
 * # Safety
 * `out` must be a valid pointer; free the string with
 * [`dopc_string_free`].
 */
enum DopcStatus dopc_features_provenance_json(const struct DopcFeatureMatrix *fm, char **out);

/**
 * Releases a feature-matrix handle.
 *
 * # Safety
 * `fm` must be a handle from this library (or NULL), not yet freed.
 */
void dopc_features_free(struct DopcFeatureMatrix *fm);

/**
 * Fits K-Means (`method = "kmeans"`) or K-Medoids (`"kmedoids"`) on the
 * feature matrix with the best of `restarts` seeded starts.
 *
 * # Safety
 * `method` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. Release the handle with [`dopc_model_free`].
 */
enum DopcStatus dopc_cluster_fit(const struct DopcFeatureMatrix *fm,
                                 const char *method,
                                 size_t k,
                                 uint64_t seed,
                                 size_t restarts,
                                 struct DopcClusterModel **out);

/**
 * Final objective value (sum of squared distances to assigned centers).
 */
double dopc_model_objective(const struct DopcClusterModel *model);

/**
 * Number of clusters, or 0 for a null handle.
 */
size_t dopc_model_k(const struct DopcClusterModel *model);

/**
 * Labels each feature row with its nearest center; `out` needs `len >=
 * rows` entries.
 *
 * # Safety
 * `out` must point to at least `len` writable u32 values.
 */
enum DopcStatus dopc_model_assign(const struct DopcClusterModel *model,
                                  const struct DopcFeatureMatrix *fm,
                                  uint32_t *out,
                                  size_t len);

/**
 * Serializes the model (method, centers, medoid indices, seed, objective)
 * to JSON.
 *
 * # Safety
 * `out` must be a valid pointer; free the string with
 * [`dopc_string_free`].
 */
enum DopcStatus dopc_model_to_json(const struct DopcClusterModel *model, char **out);

/**
 * Releases a model handle.
 *
 * # Safety
 * `model` must be a handle from this library (or NULL), not yet freed.
 */
void dopc_model_free(struct DopcClusterModel *model);

/**
 * Runs the K-sweep over `ks` and returns the report (metric table, votes,
 * recommended K) as JSON.
 *
 * # Safety
 * `ks` must point to `ks_len` readable values; `out` must be a valid
 * pointer. Free the string with [`dopc_string_free`].
 */
enum DopcStatus dopc_sweep_k(const struct DopcFeatureMatrix *fm,
                             const size_t *ks,
                             size_t ks_len,
                             uint64_t seed,
                             char **out);

/**
 * Runs the full leave-one-subject-out experiment for one
 * (extractor, clusterer) pair and returns the report as JSON.
 *
 * # Safety
 * `extractor` and `clusterer` must be valid NUL-terminated strings; `out`
 * must be a valid pointer. Free the string with [`dopc_string_free`].
 */
enum DopcStatus dopc_run_experiment(const struct DopcDataset *ds,
                                    const char *extractor,
                                    const char *clusterer,
                                    size_t k,
                                    uint64_t seed,
                                    char **out);

/**
 * Embeds the feature matrix into 2-D with `method` (`tsne`, `mds`, `lle`)
 * and writes the coordinates row-major into `out_xy` (`len >= 2 * rows`).
 *
 * # Safety
 * `method` must be a valid NUL-terminated string; `out_xy` must point to at
 * least `len` writable doubles.
 */
enum DopcStatus dopc_embed(const struct DopcFeatureMatrix *fm,
                           const char *method,
                           uint64_t seed,
                           double *out_xy,
                           size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DOPPLER_CLUSTER_H */
