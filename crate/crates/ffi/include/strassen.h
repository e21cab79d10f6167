#ifndef STRASSEN_H
#define STRASSEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result of every call. The first three values agree with the CLI exit codes.
 */
typedef enum StrassenStatus {
  STRASSEN_STATUS_OK = 0,
  STRASSEN_STATUS_VERIFICATION_FAILED = 1,
  STRASSEN_STATUS_INPUT_ERROR = 2,
  STRASSEN_STATUS_NULL_POINTER = 3,
  STRASSEN_STATUS_INVALID_UTF8 = 4,
  STRASSEN_STATUS_INTERNAL_ERROR = 5,
} StrassenStatus;

/*
 Opaque decomposition handle.
 */
typedef struct StrassenDecomposition StrassenDecomposition;

/*
 Opaque square matrix handle.
 */
typedef struct StrassenMatrix StrassenMatrix;

/*
 Scalar operation counts reported by [`strassen_multiply`].
 */
typedef struct StrassenOpCounts {
  uint64_t scalar_mults;
  uint64_t scalar_adds;
  uint64_t scalar_scalings;
} StrassenOpCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer
 stays valid until the next call into the library from the same thread.
 */
const char *strassen_last_error(void);

/*
 Derives and verifies a decomposition.

 `field` is `"rational"` or `"gf(p)"`. `d` ("a11,a12,a21,a22") and
 `u` ("u1,u2") may be null to use the defaults.

 # Safety
 String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum StrassenStatus strassen_decomposition_derive(const char *field,
                                                  const char *d,
                                                  const char *u,
                                                  struct StrassenDecomposition **out);

/*
 Parses a JSON decomposition file.

 # Safety
 `json` must be NUL-terminated; `out` must be writable.
 */
enum StrassenStatus strassen_decomposition_parse(const char *json,
                                                 struct StrassenDecomposition **out);

/*
 Serializes to the JSON file format. Free the result with
 [`strassen_string_free`].

 # Safety
 `dec` must be a live handle; `out` must be writable.
 */
enum StrassenStatus strassen_decomposition_serialize(const struct StrassenDecomposition *dec,
                                                     char **out);

/*
 Number of terms, or 0 for a null handle.

 # Safety
 `dec` must be null or a live handle.
 */
size_t strassen_decomposition_rank(const struct StrassenDecomposition *dec);

/*
 Runs the unit-pair and trilinear checks, plus the exhaustive check over
 prime fields when `exhaustive` is set. Returns
 `STRASSEN_STATUS_VERIFICATION_FAILED` when a check fails; `passed`
 (optional) receives the verdict either way.

 # Safety
 `dec` must be a live handle; `passed` must be null or writable.
 */
enum StrassenStatus strassen_decomposition_verify(const struct StrassenDecomposition *dec,
                                                  bool exhaustive,
                                                  bool *passed);

/*
 # Safety
 `dec` must be null or a handle not yet freed.
 */
void strassen_decomposition_free(struct StrassenDecomposition *dec);

/*
 Parses the text matrix format (`n <dim> field <field>` header, then rows).

 # Safety
 `text` must be NUL-terminated; `out` must be writable.
 */
enum StrassenStatus strassen_matrix_parse(const char *matrix, struct StrassenMatrix **out);

/*
 Builds an `n × n` matrix from `n * n` row-major integers.

 # Safety
 `field` must be NUL-terminated; `entries` must point to `n * n` values;
 `out` must be writable.
 */
enum StrassenStatus strassen_matrix_from_i64(const char *field,
                                             size_t n,
                                             const int64_t *entries,
                                             struct StrassenMatrix **out);

/*
 Dimension, or 0 for a null handle.

 # Safety
 `m` must be null or a live handle.
 */
size_t strassen_matrix_dim(const struct StrassenMatrix *m);

/*
 Renders in the text matrix format. Free with [`strassen_string_free`].

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum StrassenStatus strassen_matrix_to_string(const struct StrassenMatrix *m, char **out);

/*
 # Safety
 `m` must be null or a handle not yet freed.
 */
void strassen_matrix_free(struct StrassenMatrix *m);

/*
 Multiplies `a * b` by recursive application of `dec` down to blocks of
 size `cutoff` (at least 1). `counts` may be null.

 # Safety
 Handles must be live; `out` must be writable; `counts` null or writable.
 */
enum StrassenStatus strassen_multiply(const struct StrassenDecomposition *dec,
                                      const struct StrassenMatrix *a,
                                      const struct StrassenMatrix *b,
                                      size_t cutoff,
                                      struct StrassenMatrix **out,
                                      struct StrassenOpCounts *counts);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void strassen_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRASSEN_H */
