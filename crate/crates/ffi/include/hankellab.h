#ifndef HANKELLAB_H
#define HANKELLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_DIMENSION_MISMATCH = 2,
  HL_STATUS_INVALID_ARGUMENT = 3,
  HL_STATUS_OUTSIDE_DISC = 4,
  HL_STATUS_FORMAT = 5,
  HL_STATUS_IO = 6,
  HL_STATUS_ZERO_BLOCH_NORM = 7,
  HL_STATUS_NOT_HERMITIAN = 8,
  HL_STATUS_INSUFFICIENT_NODES = 9,
  HL_STATUS_PANIC = 10,
} HlStatus;

/**
 * Opaque operator-valued polynomial.
 */
typedef struct HlSymbol HlSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *hl_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *hl_version(void);

/**
 * Builds a symbol from `(degree+1)·dim·dim` complex coefficients stored as
 * interleaved `(re, im)` pairs, coefficient-major then row-major.
 *
 * # Safety
 * `coeffs` must point to `2·(degree+1)·dim·dim` readable doubles and `out`
 * to writable storage for one handle.
 */
enum HlStatus hl_symbol_new(size_t dim, size_t degree, const double *coeffs, struct HlSymbol **out);

/**
 * Parses a symbol from its JSON file format.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum HlStatus hl_symbol_from_json(const char *json, struct HlSymbol **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `symbol` must be null or a handle from this library not yet freed.
 */
void hl_symbol_free(struct HlSymbol *symbol);

/**
 * # Safety
 * `symbol` must be a live handle or null (which yields 0).
 */
size_t hl_symbol_dim(const struct HlSymbol *symbol);

/**
 * # Safety
 * `symbol` must be a live handle or null (which yields 0).
 */
size_t hl_symbol_degree(const struct HlSymbol *symbol);

/**
 * Writes the six chain values at truncation `n` into `out_values[0..6]`.
 *
 * # Safety
 * `symbol` must be live; `out_values` must hold six doubles.
 */
enum HlStatus hl_norm_chain(const struct HlSymbol *symbol,
                            double alpha,
                            size_t n,
                            double *out_values);

/**
 * Anti-analytic Gram supremum over test functions of degree `<= n`.
 *
 * # Safety
 * `symbol` must be live; `out` must be writable.
 */
enum HlStatus hl_gram_embedding(const struct HlSymbol *symbol, size_t n, double *out);

/**
 * # Safety
 * `symbol` must be live; `out` must be writable.
 */
enum HlStatus hl_adjoint_residual(const struct HlSymbol *symbol,
                                  double alpha,
                                  size_t n,
                                  double *out);

/**
 * # Safety
 * `symbol` must be live; `out` must be writable.
 */
enum HlStatus hl_leibniz_residual(const struct HlSymbol *symbol, size_t n, double *out);

/**
 * # Safety
 * `symbol` must be live; `out` must be writable.
 */
enum HlStatus hl_bloch_norm(const struct HlSymbol *symbol, double *out);

/**
 * Largest singular values `σ_max(D^α X_N)` and `σ_max(X_N D^α)` for the
 * default coefficient rule.
 *
 * # Safety
 * `left` and `right` must be writable.
 */
enum HlStatus hl_dp1_section_norms(double alpha, size_t n, double *left, double *right);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HANKELLAB_H */
