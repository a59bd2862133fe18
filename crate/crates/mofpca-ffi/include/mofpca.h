/* C interface to the mofpca library. */

#ifndef MOFPCA_H
#define MOFPCA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum MofpcaStatus {
  MOFPCA_STATUS_OK = 0,
  MOFPCA_STATUS_NULL_ARGUMENT = 1,
  MOFPCA_STATUS_INVALID_INPUT = 2,
  MOFPCA_STATUS_INVALID_CONFIG = 3,
  MOFPCA_STATUS_ENUMERATION_CAP = 4,
  MOFPCA_STATUS_INVALID_UTF8 = 5,
} MofpcaStatus;

// Opaque principal basis handle.
typedef struct MofpcaBasis MofpcaBasis;

// Opaque standardized dataset handle.
typedef struct MofpcaDataset MofpcaDataset;

// Opaque Pareto front handle (records sorted by ascending recon_error).
typedef struct MofpcaFront MofpcaFront;

// SPEA2 parameters in C layout; `r` and `d` must match the basis it is
// used with. Obtain defaults from [`mofpca_default_config`].
typedef struct MofpcaSpea2Config {
  size_t population_size;
  size_t archive_size;
  size_t generations;
  double crossover_rate;
  uint64_t seed;
  size_t r;
  size_t d;
  size_t mutation_swaps;
} MofpcaSpea2Config;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or NULL when
// no failure has occurred. The pointer stays valid until the next failing
// call on the same thread.
const char *mofpca_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *mofpca_version(void);

// Load a CSV file and standardize it. `scaling`: 0 zscore, 1 pixel, 2 none.
//
// # Safety
// `path`, `sensitive_column` and `group_a_value` must be NUL-terminated
// strings; `out` must be a valid pointer to receive the handle.
enum MofpcaStatus mofpca_dataset_load_csv(const char *path,
                                          const char *sensitive_column,
                                          const char *group_a_value,
                                          int32_t scaling,
                                          struct MofpcaDataset **out);

// Build a dataset from a dense row-major matrix (`n` rows, `d` columns).
// Rows listed in `group_a_rows` form group A, the rest group B.
//
// # Safety
// `values` must point to `n * d` doubles and `group_a_rows` to
// `group_a_len` indices; `out` must be valid.
enum MofpcaStatus mofpca_dataset_from_matrix(const double *values,
                                             size_t n,
                                             size_t d,
                                             const size_t *group_a_rows,
                                             size_t group_a_len,
                                             int32_t scaling,
                                             struct MofpcaDataset **out);

// # Safety
// `dataset` must be a handle from this library, not yet freed; NULL is a no-op.
void mofpca_dataset_free(struct MofpcaDataset *dataset);

// Sample and group counts of a dataset.
//
// # Safety
// `dataset` must be a live handle; out pointers may be NULL to skip a field.
enum MofpcaStatus mofpca_dataset_dims(const struct MofpcaDataset *dataset,
                                      size_t *n,
                                      size_t *d,
                                      size_t *n_a,
                                      size_t *n_b);

// Compute the full principal basis of a dataset.
//
// # Safety
// `dataset` must be a live handle and `out` a valid pointer.
enum MofpcaStatus mofpca_basis_compute(const struct MofpcaDataset *dataset,
                                       struct MofpcaBasis **out);

// # Safety
// `basis` must be a handle from this library, not yet freed; NULL is a no-op.
void mofpca_basis_free(struct MofpcaBasis *basis);

// Copy the eigenvalues (descending) into `buffer`; `capacity` must be at
// least the basis dimension, which is written to `written`.
//
// # Safety
// `basis` must be live; `buffer` must hold `capacity` doubles.
enum MofpcaStatus mofpca_basis_eigenvalues(const struct MofpcaBasis *basis,
                                           double *buffer,
                                           size_t capacity,
                                           size_t *written);

// Evaluate both objectives for the selection `indices[0..len]` (0-based,
// strictly increasing).
//
// # Safety
// `basis` must be live; `indices` must hold `len` entries; out pointers
// must be valid.
enum MofpcaStatus mofpca_evaluate(const struct MofpcaBasis *basis,
                                  const size_t *indices,
                                  size_t len,
                                  double *recon_error,
                                  double *fairness);

// Default SPEA2 parameters for a `d`-dimensional basis and target `r`.
// `dataset_kind`: 0 tabular (30 generations), 1 image (50).
//
// # Safety
// `out` must be a valid pointer.
enum MofpcaStatus mofpca_default_config(size_t d,
                                        size_t r,
                                        int32_t dataset_kind,
                                        struct MofpcaSpea2Config *out);

// Run the evolutionary search and return the non-dominated front.
//
// # Safety
// `basis` must be live and `out` valid.
enum MofpcaStatus mofpca_front_spea2(const struct MofpcaBasis *basis,
                                     struct MofpcaSpea2Config config,
                                     struct MofpcaFront **out);

// Enumerate every size-r subset (subject to `cap`) and return the exact
// front. `workers` threads partition the enumeration; the result does not
// depend on the worker count.
//
// # Safety
// `basis` must be live and `out` valid.
enum MofpcaStatus mofpca_front_exhaustive(const struct MofpcaBasis *basis,
                                          size_t r,
                                          uint64_t cap,
                                          size_t workers,
                                          struct MofpcaFront **out);

// # Safety
// `front` must be a handle from this library, not yet freed; NULL is a no-op.
void mofpca_front_free(struct MofpcaFront *front);

// Number of records in the front.
//
// # Safety
// `front` must be live; `len` must be valid.
enum MofpcaStatus mofpca_front_len(const struct MofpcaFront *front, size_t *len);

// Fetch record `index`: its objectives and its component indices (written
// to `indices[0..indices_cap]`, actual count in `indices_len`).
//
// # Safety
// `front` must be live; `indices` must hold `indices_cap` entries; out
// pointers may be NULL to skip fields.
enum MofpcaStatus mofpca_front_record(const struct MofpcaFront *front,
                                      size_t index,
                                      size_t *indices,
                                      size_t indices_cap,
                                      size_t *indices_len,
                                      double *recon_error,
                                      double *fairness);

// Pick the balanced solution from `front` with the scale-compensated
// weighted sum derived from `basis`. Writes the index of the chosen record
// plus the weighting diagnostics.
//
// # Safety
// `basis` and `front` must be live; out pointers may be NULL to skip fields.
enum MofpcaStatus mofpca_select(const struct MofpcaBasis *basis,
                                const struct MofpcaFront *front,
                                size_t *chosen_index,
                                double *lambda,
                                double *weighted_score);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOFPCA_H */
