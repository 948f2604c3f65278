#ifndef SL2LAB_H
#define SL2LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Sl2Status {
  SL2_STATUS_OK = 0,
  SL2_STATUS_INVALID_INPUT = 1,
  SL2_STATUS_DOMAIN = 2,
  SL2_STATUS_POLE = 3,
  SL2_STATUS_NUMERICAL = 4,
  SL2_STATUS_RESOURCE = 5,
  SL2_STATUS_NULL_POINTER = 6,
  SL2_STATUS_PANIC = 7,
} Sl2Status;

/**
 * Opaque square-tiled surface.
 */
typedef struct Sl2Origami Sl2Origami;

/**
 * Opaque list of saddle connections.
 */
typedef struct Sl2Saddles Sl2Saddles;

/**
 * Opaque extended Laplace transform of a finite atomic spectrum.
 */
typedef struct Sl2Transform Sl2Transform;

/**
 * One saddle connection, with 0-based class and square indices.
 */
typedef struct Sl2Saddle {
  size_t start_class;
  size_t end_class;
  size_t start_square;
  int64_t holonomy_x;
  int64_t holonomy_y;
  double length;
} Sl2Saddle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sl2_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sl2_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, freed once.
 */
void sl2_string_free(char *s);

/**
 * Harish-Chandra c-function `c(s)`.
 *
 * # Safety
 * `re` and `im` must be valid for writes.
 */
enum Sl2Status sl2_c_function(double s_re, double s_im, double *re, double *im);

/**
 * Spherical function `φ_s(g_t)` to relative tolerance `tol`.
 *
 * # Safety
 * `re` and `im` must be valid for writes.
 */
enum Sl2Status sl2_phi(double s_re, double s_im, double t, double tol, double *re, double *im);

/**
 * # Safety
 * `rate` must be valid for writes.
 */
enum Sl2Status sl2_eigenvalue_to_rate(double lambda, double *rate);

/**
 * # Safety
 * `lambda` must be valid for writes.
 */
enum Sl2Status sl2_rate_to_eigenvalue(double rate, double *lambda);

/**
 * Fits `k` exponentials to the samples with `t_min ≤ t ≤ t_max`. `rates`
 * and `coeffs` receive `k` values each, sorted by increasing rate.
 *
 * # Safety
 * `t` and `y` must hold `n` values; `rates` and `coeffs` must have room
 * for `k`; `residual` must be valid for writes.
 */
enum Sl2Status sl2_fit_exponential_sum(const double *t,
                                       const double *y,
                                       size_t n,
                                       size_t k,
                                       double t_min,
                                       double t_max,
                                       double *rates,
                                       double *coeffs,
                                       double *residual);

/**
 * Parses a record `n; sigma_h cycles; sigma_v cycles[; deformation a b c d]`.
 *
 * # Safety
 * `record` must be a NUL-terminated string; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_parse(const char *record, struct Sl2Origami **result);

/**
 * # Safety
 * `o` must be null or a handle from this library, freed once.
 */
void sl2_origami_free(struct Sl2Origami *o);

/**
 * Record string of the surface; release with [`sl2_string_free`].
 *
 * # Safety
 * `o` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_record(const struct Sl2Origami *o, char **result);

/**
 * # Safety
 * `o` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_n_squares(const struct Sl2Origami *o, size_t *result);

/**
 * # Safety
 * `o` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_genus(const struct Sl2Origami *o, size_t *result);

/**
 * Length of the shortest saddle connection.
 *
 * # Safety
 * `o` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_systole(const struct Sl2Origami *o, double *result);

/**
 * Recurrence observable `V_δ`.
 *
 * # Safety
 * `o` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_v_delta(const struct Sl2Origami *o, double delta, double *result);

/**
 * New surface `[[a, b], [c, d]] · o`; the matrix must have positive determinant.
 *
 * # Safety
 * `o` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_apply(const struct Sl2Origami *o,
                                 double a,
                                 double b,
                                 double c,
                                 double d,
                                 struct Sl2Origami **result);

/**
 * Saddle connections of length at most `bound`, sorted by length.
 * A `budget` of 0 means unlimited.
 *
 * # Safety
 * `o` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_origami_saddles(const struct Sl2Origami *o,
                                   double bound,
                                   uint64_t budget,
                                   struct Sl2Saddles **result);

/**
 * # Safety
 * `list` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_saddles_len(const struct Sl2Saddles *list, size_t *result);

/**
 * # Safety
 * `list` must be a live handle; `result` must be valid for writes.
 */
enum Sl2Status sl2_saddles_get(const struct Sl2Saddles *list,
                               size_t index,
                               struct Sl2Saddle *result);

/**
 * # Safety
 * `list` must be null or a handle from this library, freed once.
 */
void sl2_saddles_free(struct Sl2Saddles *list);

/**
 * Builds the transform for atoms at `s[i]` (strictly increasing, in
 * `(0, 1]`) with weights `w[i]`, split at `delta`.
 *
 * # Safety
 * `s` and `w` must hold `n` values; `result` must be valid for writes.
 */
enum Sl2Status sl2_transform_new(const double *s,
                                 const double *w,
                                 size_t n,
                                 double delta,
                                 struct Sl2Transform **result);

/**
 * # Safety
 * `f` must be a live handle; `re` and `im` must be valid for writes.
 */
enum Sl2Status sl2_transform_eval(const struct Sl2Transform *f,
                                  double z_re,
                                  double z_im,
                                  double *re,
                                  double *im);

/**
 * # Safety
 * `f` must be null or a handle from this library, freed once.
 */
void sl2_transform_free(struct Sl2Transform *f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SL2LAB_H */
