#ifndef SYMSEP_H
#define SYMSEP_H

/* Generated by cbindgen from symsep-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every FFI call.
 */
typedef enum {
  SYMSEP_STATUS_OK = 0,
  SYMSEP_STATUS_NULL_POINTER = 1,
  SYMSEP_STATUS_INVALID_ARGUMENT = 2,
  SYMSEP_STATUS_SIZE_EXCEEDED = 3,
  SYMSEP_STATUS_OVERFLOW = 4,
  SYMSEP_STATUS_NO_CONVERGENCE = 5,
  SYMSEP_STATUS_INTERNAL_PANIC = 6,
} SymsepStatus;

/**
 * Opaque handle to a density matrix.
 */
typedef struct SymsepDensityMatrix SymsepDensityMatrix;

/**
 * Opaque handle to a symmetric-subspace pure state.
 */
typedef struct SymsepState SymsepState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *symsep_last_error_message(void);

/**
 * Library version as a static C string.
 */
const char *symsep_version(void);

/**
 * Dimension of the symmetric subspace of m sites of local dimension d.
 * Fails with `SYMSEP_STATUS_OVERFLOW` when the count does not fit u64.
 *
 * # Safety
 * `out` must point to writable memory for one u64.
 */
SymsepStatus symsep_dim_sym(uint64_t d, uint64_t m, uint64_t *out);

/**
 * Exact floor on the ensemble-mean top Schmidt weight of a two-site
 * reduction: dim_sym(2^n, m-2)/dim_sym(2^n, m).
 *
 * # Safety
 * `out` must point to writable memory for one double.
 */
SymsepStatus symsep_schmidt_weight_floor(uint32_t n, uint64_t m, double *out);

/**
 * sqrt(2 * eof_nats), the Pinsker-type distance bound.
 *
 * # Safety
 * `out` must point to writable memory for one double.
 */
SymsepStatus symsep_pinsker_upper(double eof_nats, double *out);

/**
 * Draw a uniformly random symmetric state of m sites of n qubits each
 * from RNG stream (seed, stream). Free with [`symsep_state_free`].
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
SymsepStatus symsep_random_symmetric_state(uint64_t seed,
                                           uint64_t stream,
                                           uint32_t n,
                                           uint64_t m,
                                           SymsepState **out);

/**
 * Build the Dicke-type basis state with the given occupation vector
 * (length 2^n, entries summing to m). Free with [`symsep_state_free`].
 *
 * # Safety
 * `occupation` must point to `occupation_len` readable u32 values and
 * `out` to writable memory for one pointer.
 */
SymsepStatus symsep_dicke_state(uint32_t n,
                                uint64_t m,
                                const uint32_t *occupation,
                                size_t occupation_len,
                                SymsepState **out);

/**
 * # Safety
 * `state` must be a pointer from this library that has not been freed.
 */
void symsep_state_free(SymsepState *state);

/**
 * Two-site reduction of a symmetric state (combinatorial fast path).
 * Free the result with [`symsep_dm_free`].
 *
 * # Safety
 * `state` must be a live handle from this library; `out` must point to
 * writable memory for one pointer.
 */
SymsepStatus symsep_reduce_two_sites(const SymsepState *state, SymsepDensityMatrix **out);

/**
 * First-pair reduction of the symmetric maximally entangled state on
 * m = 2k sites of n qubits each, equal to
 * rho_bar + (2/m)(|Phi+><Phi+| - rho_bar).
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
SymsepStatus symsep_phi_reduced(uint32_t n, uint64_t k, SymsepDensityMatrix **out);

/**
 * The isotropic twirl of |00><00| on C^d (x) C^d.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
SymsepStatus symsep_rho_bar(uint64_t d, SymsepDensityMatrix **out);

/**
 * # Safety
 * `dm` must be a pointer from this library that has not been freed.
 */
void symsep_dm_free(SymsepDensityMatrix *dm);

/**
 * Total Hilbert-space dimension of a density matrix handle.
 *
 * # Safety
 * `dm` must be a live handle; `out` must be writable.
 */
SymsepStatus symsep_dm_dim(const SymsepDensityMatrix *dm, uint64_t *out);

/**
 * Read entry (i, j) of a density matrix.
 *
 * # Safety
 * `dm` must be a live handle; `re` and `im` must be writable.
 */
SymsepStatus symsep_dm_entry(const SymsepDensityMatrix *dm,
                             uint64_t i,
                             uint64_t j,
                             double *re,
                             double *im);

/**
 * Exact two-qubit entanglement of formation; `bits` selects base 2
 * instead of nats.
 *
 * # Safety
 * `dm` must be a live handle; `out` must be writable.
 */
SymsepStatus symsep_eof_two_qubit(const SymsepDensityMatrix *dm, bool bits, double *out);

/**
 * Negativity across the cut after `cut` subsystems.
 *
 * # Safety
 * `dm` must be a live handle; `out` must be writable.
 */
SymsepStatus symsep_negativity(const SymsepDensityMatrix *dm, uint64_t cut, double *out);

/**
 * PPT flag across the cut after `cut` subsystems.
 *
 * # Safety
 * `dm` must be a live handle; `out` must be writable.
 */
SymsepStatus symsep_is_ppt(const SymsepDensityMatrix *dm, uint64_t cut, bool *out);

/**
 * Trace-norm distance to the PPT set across the cut (equals the
 * separable distance for two qubits). Writes the value, the solver's
 * stationarity gap, and the iteration count.
 *
 * # Safety
 * `dm` must be a live handle; `value`, `gap` and `iterations` must be
 * writable.
 */
SymsepStatus symsep_sep_distance(const SymsepDensityMatrix *dm,
                                 uint64_t cut,
                                 double tol,
                                 double *value,
                                 double *gap,
                                 uint64_t *iterations);

/**
 * Acceptance probability of the symmetrization test on a raw amplitude
 * vector over `num_sites` sites whose dimensions are in `dims`.
 *
 * # Safety
 * `amps_re` and `amps_im` must point to `len` readable doubles, `dims`
 * to `num_sites` readable u64 values, and `out` must be writable.
 */
SymsepStatus symsep_symmetry_test_probability(const double *amps_re,
                                              const double *amps_im,
                                              size_t len,
                                              const uint64_t *dims,
                                              size_t num_sites,
                                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMSEP_H */
