#ifndef COHERENCE_LAB_H
#define COHERENCE_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum ClabStatus {
  CLAB_STATUS_OK = 0,
  CLAB_STATUS_NULL_POINTER = 1,
  CLAB_STATUS_INVALID_ARGUMENT = 2,
  CLAB_STATUS_BUFFER_TOO_SMALL = 3,
  CLAB_STATUS_NUMERICAL_FAILURE = 4,
  CLAB_STATUS_PANIC = 5,
} ClabStatus;

/*
 Strategy selector for `clab_chsh_maximize`.
 */
typedef enum ClabChshStrategy {
  CLAB_CHSH_STRATEGY_ANALYTIC_QUBIT = 0,
  CLAB_CHSH_STRATEGY_MULTISTART_LOCAL_SEARCH = 1,
} ClabChshStrategy;

/*
 Opaque state handle.
 */
typedef struct ClabState ClabState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after success.
 The pointer stays valid until the next library call on the same thread.
 */
const char *clab_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *clab_version(void);

/*
 Glauber coherent state `|alpha>` truncated at Fock cutoff `cutoff`.

 # Safety
 `out` must be valid for writing one pointer.
 */
enum ClabStatus clab_glauber_cs(double alpha_re,
                                double alpha_im,
                                size_t cutoff,
                                struct ClabState **out);

/*
 Number state `|n>` with Fock cutoff `cutoff`.

 # Safety
 `out` must be valid for writing one pointer.
 */
enum ClabStatus clab_fock_state(size_t n, size_t cutoff, struct ClabState **out);

/*
 Spin coherent state `|j, zeta>` with `j = two_j / 2`.

 # Safety
 `out` must be valid for writing one pointer.
 */
enum ClabStatus clab_spin_cs(uint32_t two_j,
                             double zeta_re,
                             double zeta_im,
                             struct ClabState **out);

/*
 Spin basis state `|j, m>` with `j = two_j / 2`, `m = two_m / 2`.

 # Safety
 `out` must be valid for writing one pointer.
 */
enum ClabStatus clab_spin_basis(uint32_t two_j, int32_t two_m, struct ClabState **out);

/*
 Splits a spin state into spins `two_j_b / 2` and `two_j_c / 2`.

 # Safety
 `state` must be a live handle; `out` must be valid for writing one pointer.
 */
enum ClabStatus clab_split_spin(const struct ClabState *state,
                                uint32_t two_j_b,
                                uint32_t two_j_c,
                                struct ClabState **out);

/*
 Splits a single-mode Fock state with beamsplitter weights `mu`, `nu`.

 # Safety
 `state` must be a live handle; `out` must be valid for writing one pointer.
 */
enum ClabStatus clab_split_fock(const struct ClabState *state,
                                double mu_re,
                                double mu_im,
                                double nu_re,
                                double nu_im,
                                struct ClabState **out);

/*
 Hilbert-space dimension of `state`.

 # Safety
 `state` must be a live handle; `dim` must be valid for writing.
 */
enum ClabStatus clab_state_dim(const struct ClabState *state, size_t *dim);

/*
 Copies the amplitudes into `re[0..len]` and `im[0..len]`. Fails with
 `BufferTooSmall` when `len` is less than the dimension.

 # Safety
 `state` must be a live handle; `re` and `im` must each be valid for
 `len` writes.
 */
enum ClabStatus clab_state_amplitudes(const struct ClabState *state,
                                      double *re,
                                      double *im,
                                      size_t len);

/*
 Entanglement entropy in bits of a two-factor state.

 # Safety
 `state` must be a live handle; `bits` must be valid for writing.
 */
enum ClabStatus clab_entanglement_entropy(const struct ClabState *state, double *bits);

/*
 Closed-form CHSH maximum of a two-qubit state.

 # Safety
 `state` must be a live handle; `value` must be valid for writing.
 */
enum ClabStatus clab_horodecki_max(const struct ClabState *state, double *value);

/*
 Maximizes the CHSH quantity. `n_starts` and `seed` are used by the
 multistart strategy only; `n_starts = 0` selects the default.

 # Safety
 `state` must be a live handle; `value` must be valid for writing.
 */
enum ClabStatus clab_chsh_maximize(const struct ClabState *state,
                                   enum ClabChshStrategy strategy,
                                   size_t n_starts,
                                   uint64_t seed,
                                   double *value);

/*
 Serializes `state` as JSON. Release the string with `clab_string_free`.

 # Safety
 `state` must be a live handle; `out` must be valid for writing one pointer.
 */
enum ClabStatus clab_state_to_json(const struct ClabState *state, char **out);

/*
 Parses a state from JSON as produced by `clab_state_to_json`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be valid for writing
 one pointer.
 */
enum ClabStatus clab_state_from_json(const char *json, struct ClabState **out);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void clab_string_free(char *s);

/*
 Releases a state handle. Null is ignored.

 # Safety
 `state` must come from this library and not be freed twice.
 */
void clab_state_free(struct ClabState *state);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COHERENCE_LAB_H */
