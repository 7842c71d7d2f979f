#ifndef ANTISYM_H
#define ANTISYM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AntisymStatus {
  ANTISYM_STATUS_OK = 0,
  ANTISYM_STATUS_NULL_POINTER = 1,
  ANTISYM_STATUS_INVALID_ARGUMENT = 2,
  ANTISYM_STATUS_PARSE = 3,
  ANTISYM_STATUS_SOLVER = 4,
  ANTISYM_STATUS_BUFFER_TOO_SMALL = 5,
  ANTISYM_STATUS_PANIC = 6,
} AntisymStatus;

/**
 * Opaque handle to a Hamiltonian family.
 */
typedef struct AntisymFamily AntisymFamily;

typedef struct AntisymSymmetryCounts {
  size_t commuting;
  size_t conjugating;
  size_t parities;
  size_t group_order;
  size_t class_count;
} AntisymSymmetryCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a built-in model such as `"ring4"`, `"chain6"` or `"ho2"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum AntisymStatus antisym_family_builtin(const char *name, struct AntisymFamily **out);

/**
 * Parses a lattice description (`{"n": .., "edges": [[i, j, w], ..], "signature": [..]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum AntisymStatus antisym_family_from_json(const char *json, struct AntisymFamily **out);

/**
 * Releases a family. Null is ignored.
 *
 * # Safety
 * `family` must come from this library and must not be used afterwards.
 */
void antisym_family_free(struct AntisymFamily *family);

/**
 * Number of sites, or 0 for a null handle.
 *
 * # Safety
 * `family` must be null or a live handle.
 */
size_t antisym_family_size(const struct AntisymFamily *family);

/**
 * Writes `H(gamma)` row-major into `re` and `im`, each of length `len ≥ n²`.
 *
 * # Safety
 * `re` and `im` must each point to `len` writable doubles.
 */
enum AntisymStatus antisym_hamiltonian_at(const struct AntisymFamily *family,
                                          double gamma,
                                          double *re,
                                          double *im,
                                          size_t len);

/**
 * Eigenvalues of `H(gamma)` in canonical order (ascending real part, then
 * imaginary part) into `re` and `im`, each of length `len ≥ n`.
 *
 * # Safety
 * `re` and `im` must each point to `len` writable doubles.
 */
enum AntisymStatus antisym_eigenvalues(const struct AntisymFamily *family,
                                       double gamma,
                                       double *re,
                                       double *im,
                                       size_t len);

/**
 * Symmetry census and the size of the group they generate.
 *
 * # Safety
 * `out` must be writable.
 */
enum AntisymStatus antisym_symmetry_counts(const struct AntisymFamily *family,
                                           struct AntisymSymmetryCounts *out);

/**
 * Name of the symmetry group, NUL-terminated. `needed` (may be null)
 * receives the size including the NUL, also when the buffer is too small.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum AntisymStatus antisym_group_name(const struct AntisymFamily *family,
                                      char *buf,
                                      size_t len,
                                      size_t *needed);

/**
 * First-order prediction: true if some level acquires an imaginary slope.
 *
 * # Safety
 * `out` must be writable.
 */
enum AntisymStatus antisym_extremely_broken(const struct AntisymFamily *family, bool *out);

/**
 * Exceptional points on `[lo, hi]` scanned with `grid` cells, ascending.
 * `count` receives the number found; they are written to `out` only if
 * `cap >= count`, otherwise the status is `BufferTooSmall`.
 *
 * # Safety
 * `out` must point to `cap` writable doubles; `count` must be writable.
 */
enum AntisymStatus antisym_exceptional_points(const struct AntisymFamily *family,
                                              double lo,
                                              double hi,
                                              size_t grid,
                                              double *out,
                                              size_t cap,
                                              size_t *count);

/**
 * Copies the calling thread's last error message (empty after a success).
 * Returns the size needed including the NUL; nothing is written if `len`
 * is smaller than that.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t antisym_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANTISYM_H */
