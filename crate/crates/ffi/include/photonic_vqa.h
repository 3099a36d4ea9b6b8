#ifndef PHOTONIC_VQA_H
#define PHOTONIC_VQA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Stage selector for the mesh functions.
 */
#define PV_STAGE_PUMP 0

#define PV_STAGE_IDLER 1

#define PV_STAGE_SIGNAL 2

/**
 * Result code of every fallible call.
 */
typedef enum {
  PV_STATUS_OK = 0,
  PV_STATUS_INVALID_ARGUMENT = 1,
  PV_STATUS_INDEX_OUT_OF_RANGE = 2,
  PV_STATUS_CONTRACT_VIOLATION = 3,
  PV_STATUS_LOOKUP_FAILED = 4,
  PV_STATUS_FIT_FAILED = 5,
  PV_STATUS_CONSTRUCTION_FAILED = 6,
  PV_STATUS_EMPTY_RECORD = 7,
  PV_STATUS_NUMERICAL_FAILURE = 8,
  PV_STATUS_DATA_ERROR = 9,
  PV_STATUS_NULL_POINTER = 10,
  PV_STATUS_PANIC = 11,
} PvStatus;

/**
 * Opaque cost model bound to its ansatz.
 */
typedef struct PvCostModel PvCostModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pv_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pv_version(void);

/**
 * H2 energy model at bond length `r` (Å, on the tabulated grid) with the
 * one-angle ansatz.
 *
 * # Safety
 * `out_model` must be a valid pointer to writable storage.
 */
PvStatus pv_cost_model_h2(double r, PvCostModel **out_model);

/**
 * Factoring cost model for `n` with the three-angle pump ansatz.
 *
 * # Safety
 * `out_model` must be a valid pointer to writable storage.
 */
PvStatus pv_cost_model_vqf(uint64_t n, PvCostModel **out_model);

/**
 * Releases a model; null is ignored.
 *
 * # Safety
 * `model` must come from a constructor above and not be used afterwards.
 */
void pv_cost_model_free(PvCostModel *model);

/**
 * Number of parameters the model expects, 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t pv_cost_model_num_params(const PvCostModel *model);

/**
 * Number of measurement settings one sampled evaluation uses.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t pv_cost_model_num_settings(const PvCostModel *model);

/**
 * Noiseless cost at `params` for source indistinguishability `epsilon`.
 * `std_err_out` may be null.
 *
 * # Safety
 * `params` must point to `n_params` doubles; outputs must be writable.
 */
PvStatus pv_cost_model_evaluate(const PvCostModel *model,
                                const double *params,
                                size_t n_params,
                                double epsilon,
                                double *value_out,
                                double *std_err_out);

/**
 * Shot-noise estimate with `counts` coincidences per setting. Pass
 * `car = INFINITY` to disable accidentals. Identical arguments give
 * identical results.
 *
 * # Safety
 * `params` must point to `n_params` doubles; outputs must be writable.
 */
PvStatus pv_cost_model_evaluate_sampled(const PvCostModel *model,
                                        const double *params,
                                        size_t n_params,
                                        double epsilon,
                                        uint64_t counts,
                                        double car,
                                        uint64_t seed,
                                        uint64_t eval_index,
                                        double *value_out,
                                        double *std_err_out);

/**
 * Writes the 4×4 matrix of a preparation (`PV_STAGE_PUMP`) or projection
 * stage in row-major order as separate real and imaginary parts.
 *
 * # Safety
 * `theta` needs 3 doubles, `phi` 4, `re_out` and `im_out` 16 each.
 */
PvStatus pv_stage_matrix(int32_t stage,
                         const double *theta,
                         const double *phi,
                         double *re_out,
                         double *im_out);

/**
 * Phases of a projection stage whose output 2 measures the unit vector
 * `(re + i·im)`.
 *
 * # Safety
 * `re`, `im`, `phi_out` need 4 doubles, `theta_out` 3.
 */
PvStatus pv_phases_for_projector(int32_t stage,
                                 const double *re,
                                 const double *im,
                                 double *theta_out,
                                 double *phi_out);

/**
 * The 16 integer weights of the factoring Hamiltonian for `n`, ordered by
 * the number of Z factors and then lexicographically by qubit.
 *
 * # Safety
 * `out16` must hold 16 int64 values.
 */
PvStatus pv_vqf_coefficients(uint64_t n, int64_t *out16);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHOTONIC_VQA_H */
