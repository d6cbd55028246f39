#ifndef FUNCTREE_H
#define FUNCTREE_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_NULL_POINTER = 1,
  FT_STATUS_INVALID_UTF8 = 2,
  FT_STATUS_MALFORMED_INPUT = 3,
  FT_STATUS_NOT_A_FUNCTIONAL_TREE = 4,
  FT_STATUS_INVALID_PERMUTATION = 5,
  FT_STATUS_PRECONDITION_VIOLATED = 6,
  FT_STATUS_RESOURCE_LIMIT = 7,
  FT_STATUS_NOT_BETA_LABELING = 8,
  FT_STATUS_NOT_FOUND = 9,
  FT_STATUS_VERIFICATION_FAILED = 10,
  FT_STATUS_UNSUPPORTED_FORMAT = 11,
  FT_STATUS_BUFFER_TOO_SMALL = 12,
  FT_STATUS_IO = 13,
  FT_STATUS_INTERNAL = 14,
} FtStatus;

/**
 * A verified cyclic decomposition.
 */
typedef struct FtDecomposition FtDecomposition;

/**
 * A verified oriented beta-labeling.
 */
typedef struct FtLabeling FtLabeling;

/**
 * A validated functional tree.
 */
typedef struct FtTree FtTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's most recent error message, or returns null if
 * there is none. Release the result with `ft_string_free`.
 */
char *ft_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void ft_string_free(char *s);

/**
 * Builds a tree from its parent map `g[0..n]`.
 *
 * # Safety
 * `g` must point to `n` readable values; `out` must be writable.
 */
enum FtStatus ft_tree_from_parent_map(const size_t *g, size_t n, struct FtTree **out);

/**
 * Parses `{"n":..,"g":[..]}` or a bare parent map.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FtStatus ft_tree_from_json(const char *json, struct FtTree **out);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live tree handle.
 */
size_t ft_tree_vertex_count(const struct FtTree *t);

/**
 * # Safety
 * `t` must be null or a tree handle that is not used afterwards.
 */
void ft_tree_free(struct FtTree *t);

/**
 * Searches for an oriented beta-labeling of `t`.
 *
 * # Safety
 * `t` must be a live tree handle; `out` must be writable.
 */
enum FtStatus ft_labeling_find(const struct FtTree *t, struct FtLabeling **out);

/**
 * Verifies `sigma[0..n]` as an oriented beta-labeling of `t`.
 *
 * # Safety
 * `t` must be a live tree handle, `sigma` must point to `n` readable values
 * and `out` must be writable.
 */
enum FtStatus ft_labeling_verify(const struct FtTree *t,
                                 const size_t *sigma,
                                 size_t n,
                                 struct FtLabeling **out);

/**
 * Copies the permutation into `buf[0..len]`; `len` must be at least the
 * number of vertices.
 *
 * # Safety
 * `lab` must be a live labeling handle and `buf` must have room for `len` values.
 */
enum FtStatus ft_labeling_sigma(const struct FtLabeling *lab, size_t *buf, size_t len);

/**
 * # Safety
 * `lab` must be null or a labeling handle that is not used afterwards.
 */
void ft_labeling_free(struct FtLabeling *lab);

/**
 * Decomposes the host named by `target` ("knn", "k2n1" or "knxnx").
 * `x` is ignored for "knn".
 *
 * # Safety
 * `t` and `lab` must be live handles, `target` a NUL-terminated string and
 * `out` writable.
 */
enum FtStatus ft_decompose(const struct FtTree *t,
                           const struct FtLabeling *lab,
                           const char *target,
                           size_t x,
                           struct FtDecomposition **out);

/**
 * Number of copies, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live decomposition handle.
 */
size_t ft_decomposition_copy_count(const struct FtDecomposition *d);

/**
 * Re-runs the partition verifier and stores the verdict in `pass`.
 *
 * # Safety
 * `d` must be a live decomposition handle and `pass` writable.
 */
enum FtStatus ft_decomposition_verify(const struct FtDecomposition *d, bool *pass);

/**
 * # Safety
 * `d` must be null or a decomposition handle that is not used afterwards.
 */
void ft_decomposition_free(struct FtDecomposition *d);

/**
 * Renders a tree as "json" or "dot".
 *
 * # Safety
 * `t` must be a live handle, `format` a NUL-terminated string and `out` writable.
 */
enum FtStatus ft_tree_export(const struct FtTree *t, const char *format, char **out);

/**
 * Renders a labeling as "json" or "dot".
 *
 * # Safety
 * Same as `ft_tree_export`.
 */
enum FtStatus ft_labeling_export(const struct FtLabeling *lab, const char *format, char **out);

/**
 * Renders a decomposition as "json" or "dot" (one frame per copy).
 *
 * # Safety
 * Same as `ft_tree_export`.
 */
enum FtStatus ft_decomposition_export(const struct FtDecomposition *d,
                                      const char *format,
                                      char **out);

/**
 * Checks that the certificate has the same magnitude at every labeling
 * permutation. `expected` receives that magnitude in decimal.
 *
 * # Safety
 * `t` must be a live handle; `expected` and `pass` must be writable.
 */
enum FtStatus ft_certificate_magnitude(const struct FtTree *t, char **expected, bool *pass);

/**
 * Checks the apportionment of `I ⊗ A` at tolerance `tol`. `kappa_error`
 * receives the largest deviation of an entry modulus from `1/n`.
 *
 * # Safety
 * `t` and `lab` must be live handles; `kappa_error` and `pass` writable.
 */
enum FtStatus ft_apportion_check(const struct FtTree *t,
                                 const struct FtLabeling *lab,
                                 double tol,
                                 double *kappa_error,
                                 bool *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUNCTREE_H */
