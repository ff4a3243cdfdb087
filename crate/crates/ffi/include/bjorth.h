#ifndef BJORTH_H
#define BJORTH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BjStatus {
  BJ_STATUS_OK = 0,
  BJ_STATUS_NULL_POINTER = 1,
  BJ_STATUS_INVALID_ARGUMENT = 2,
  BJ_STATUS_SHAPE_MISMATCH = 3,
  BJ_STATUS_NON_FINITE = 4,
  BJ_STATUS_ZERO_MATRIX = 5,
  BJ_STATUS_PARSE = 6,
  BJ_STATUS_INTERNAL = 7,
} BjStatus;

typedef enum BjMethod {
  BJ_METHOD_CRITERION = 0,
  BJ_METHOD_MINIMIZE = 1,
} BjMethod;

typedef enum BjOrthogonality {
  BJ_ORTHOGONALITY_ORTHOGONAL = 0,
  BJ_ORTHOGONALITY_NOT_ORTHOGONAL = 1,
  BJ_ORTHOGONALITY_BORDERLINE = 2,
} BjOrthogonality;

typedef enum BjMembership {
  BJ_MEMBERSHIP_CONTAINS = 0,
  BJ_MEMBERSHIP_EXCLUDES = 1,
  BJ_MEMBERSHIP_BORDERLINE = 2,
} BjMembership;

/**
 * Opaque element of a direct sum of matrix blocks.
 */
typedef struct BjElement BjElement;

/**
 * Opaque dense complex matrix.
 */
typedef struct BjMatrix BjMatrix;

/**
 * Verdict of an orthogonality query. `margin` is oracle-specific; negative
 * values lean towards non-orthogonality.
 */
typedef struct BjVerdict {
  enum BjOrthogonality state;
  double margin;
} BjVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or NULL after a
 * successful call. The pointer stays valid until the next call into this
 * library on the same thread.
 */
const char *bj_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bj_version(void);

/**
 * Creates a `rows x cols` matrix from row-major real and imaginary parts.
 * `im` may be NULL for a real matrix.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `rows * cols` doubles, and
 * `out` must be a valid pointer.
 */
enum BjStatus bj_matrix_new(size_t rows,
                            size_t cols,
                            const double *re,
                            const double *im,
                            struct BjMatrix **out);

/**
 * Releases a matrix. NULL is ignored.
 *
 * # Safety
 * `m` must be NULL or a handle from [`bj_matrix_new`] not yet freed.
 */
void bj_matrix_free(struct BjMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; `rows` and `cols` must be valid pointers.
 */
enum BjStatus bj_matrix_shape(const struct BjMatrix *m, size_t *rows, size_t *cols);

/**
 * Reads entry `(i, j)`, zero-based.
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` must be valid pointers.
 */
enum BjStatus bj_matrix_get(const struct BjMatrix *m, size_t i, size_t j, double *re, double *im);

/**
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum BjStatus bj_spectral_norm(const struct BjMatrix *m, double *out);

/**
 * Decides whether `A ⊥ B` for two matrices of equal shape.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a valid pointer.
 */
enum BjStatus bj_check(const struct BjMatrix *a,
                       const struct BjMatrix *b,
                       enum BjMethod method,
                       struct BjVerdict *out);

/**
 * Whether 0 lies in the numerical range of a square matrix. `margin`
 * receives the signed distance of 0 to the boundary (positive inside).
 *
 * # Safety
 * `m` must be a live handle; `membership` and `margin` must be valid pointers.
 */
enum BjStatus bj_zero_in_numrange(const struct BjMatrix *m,
                                  enum BjMembership *membership,
                                  double *margin);

/**
 * Creates an element of `M_{n_1} ⊕ ... ⊕ M_{n_l}` with `sizes = [n_1..n_l]`.
 * `re` and `im` hold the blocks' row-major entries back to back; `im` may
 * be NULL.
 *
 * # Safety
 * `sizes` must point to `num_blocks` values and `re` (and `im` when
 * non-null) to `sum n_k²` doubles; `out` must be a valid pointer.
 */
enum BjStatus bj_element_new(size_t num_blocks,
                             const size_t *sizes,
                             const double *re,
                             const double *im,
                             struct BjElement **out);

/**
 * Parses the JSON element format used by the command-line tool.
 *
 * # Safety
 * `text` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
 */
enum BjStatus bj_element_from_json(const char *text, struct BjElement **out);

/**
 * Serializes an element to JSON. Release the string with [`bj_string_free`].
 *
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum BjStatus bj_element_to_json(const struct BjElement *e, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from [`bj_element_to_json`] not yet freed.
 */
void bj_string_free(char *s);

/**
 * Releases an element. NULL is ignored.
 *
 * # Safety
 * `e` must be NULL or a handle from this library not yet freed.
 */
void bj_element_free(struct BjElement *e);

/**
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum BjStatus bj_element_norm(const struct BjElement *e, double *out);

/**
 * Decides whether `A ⊥ B` in the direct sum.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a valid pointer.
 */
enum BjStatus bj_check_alg(const struct BjElement *a,
                           const struct BjElement *b,
                           struct BjVerdict *out);

/**
 * Whether a nonzero element is smooth.
 *
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum BjStatus bj_is_smooth(const struct BjElement *e, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BJORTH_H */
