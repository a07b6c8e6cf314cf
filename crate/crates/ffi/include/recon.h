#ifndef RECON_H
#define RECON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `Ok` is zero; the others mirror the library's error kinds.
 */
typedef enum ReconStatus {
  RECON_STATUS_OK = 0,
  RECON_STATUS_NULL_POINTER = 1,
  RECON_STATUS_INVALID_INPUT = 2,
  RECON_STATUS_DEGENERATE_SIMPLEX = 3,
  RECON_STATUS_NOT_IN_AFFINE_HULL = 4,
  RECON_STATUS_NOT_FOUND = 5,
  RECON_STATUS_INFEASIBLE_SPEC = 6,
  RECON_STATUS_INSUFFICIENT_NEIGHBORS = 7,
  RECON_STATUS_ORIENTATION_UNDEFINED = 8,
  RECON_STATUS_NO_CANDIDATES = 9,
  RECON_STATUS_MISSING_WEIGHT = 10,
  RECON_STATUS_GENERICITY_VIOLATION = 11,
  RECON_STATUS_DEGENERATE_NORMALIZATION = 12,
  RECON_STATUS_NUMERICAL_FAILURE = 13,
  RECON_STATUS_UNSUPPORTED_FORMAT = 14,
  RECON_STATUS_PARSE_ERROR = 15,
  RECON_STATUS_IO_ERROR = 16,
  RECON_STATUS_PANIC = 17,
} ReconStatus;

/**
 * Analytic manifolds available to [`recon_cloud_generate`].
 */
typedef enum ReconManifold {
  /**
   * Circle of radius `a` in the plane.
   */
  RECON_MANIFOLD_CIRCLE = 0,
  /**
   * Sphere of radius `a` in R^3.
   */
  RECON_MANIFOLD_SPHERE = 1,
  /**
   * Torus with major radius `a` and minor radius `b` in R^3.
   */
  RECON_MANIFOLD_TORUS = 2,
} ReconManifold;

/**
 * Complexes the chain problem can be posed on.
 */
typedef enum ReconComplex {
  RECON_COMPLEX_RIPS = 0,
  RECON_COMPLEX_CECH = 1,
  RECON_COMPLEX_DELAUNAY_CECH = 2,
} ReconComplex;

/**
 * Opaque point cloud.
 */
typedef struct ReconCloud ReconCloud;

/**
 * Opaque reconstruction outcome.
 */
typedef struct ReconResult ReconResult;

/**
 * Parameters of [`recon_reconstruct`]. Non-positive `rho` or `scale_r`
 * select the defaults `16 epsilon` and `epsilon`.
 */
typedef struct ReconParams {
  size_t d;
  double epsilon;
  double rho;
  double scale_r;
  enum ReconComplex complex;
  uint64_t seed;
} ReconParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *recon_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *recon_version(void);

/**
 * Copies `n_points * dim` row-major coordinates into a new cloud.
 *
 * # Safety
 * `coords` must point to `n_points * dim` readable doubles and `out` must be
 * a valid pointer.
 */
enum ReconStatus recon_cloud_new(const double *coords,
                                 size_t n_points,
                                 size_t dim,
                                 struct ReconCloud **out);

/**
 * Samples about `n` points of an analytic manifold with normal noise of
 * size at most `delta`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ReconStatus recon_cloud_generate(enum ReconManifold kind,
                                      double a,
                                      double b,
                                      size_t n,
                                      double delta,
                                      uint64_t seed,
                                      struct ReconCloud **out);

/**
 * # Safety
 * `cloud` must be null or a handle from this library not yet freed.
 */
void recon_cloud_free(struct ReconCloud *cloud);

/**
 * # Safety
 * `cloud` must be null or a live handle.
 */
size_t recon_cloud_len(const struct ReconCloud *cloud);

/**
 * # Safety
 * `cloud` must be null or a live handle.
 */
size_t recon_cloud_dim(const struct ReconCloud *cloud);

/**
 * Copies the coordinates of point `i` into `buf`, which holds `dim` doubles.
 *
 * # Safety
 * `cloud` must be a live handle and `buf` must have room for `dim` doubles.
 */
enum ReconStatus recon_cloud_point(const struct ReconCloud *cloud, size_t i, double *buf);

/**
 * Solves the chain problem on `cloud` with realistic normalization and
 * compares the solution with the Delloc complex.
 *
 * # Safety
 * `cloud` and `params` must be live, `out` a valid pointer.
 */
enum ReconStatus recon_reconstruct(const struct ReconCloud *cloud,
                                   const struct ReconParams *params,
                                   struct ReconResult **out);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void recon_result_free(struct ReconResult *result);

/**
 * 1 if the solver reached an optimum with residuals within tolerance.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
int32_t recon_result_ok(const struct ReconResult *result);

/**
 * 1 or 0 for the comparison with the Delloc complex, -1 if not evaluated.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
int32_t recon_result_matches_delloc(const struct ReconResult *result);

/**
 * Delaunay energy of the optimal chain.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double recon_result_energy(const struct ReconResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
int64_t recon_result_euler_characteristic(const struct ReconResult *result);

/**
 * Dimension `d` of the chain.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t recon_result_dim(const struct ReconResult *result);

/**
 * Number of simplices with a nonzero coefficient.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t recon_result_support_size(const struct ReconResult *result);

/**
 * Writes the support: `vertices` receives `(d + 1) * size` sorted vertex
 * indices, `coefficients` `size` values. Either buffer may be null.
 *
 * # Safety
 * Non-null buffers must have room for the counts above, where `size` is
 * [`recon_result_support_size`].
 */
enum ReconStatus recon_result_support(const struct ReconResult *result,
                                      size_t *vertices,
                                      double *coefficients);

/**
 * Full JSON report as a new string; release it with [`recon_string_free`].
 *
 * # Safety
 * `result` must be null or a live handle.
 */
char *recon_result_report_json(const struct ReconResult *result);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void recon_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECON_H */
