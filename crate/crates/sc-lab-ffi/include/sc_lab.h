/* sc-lab C ABI */

#pragma once

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Continuation rule for table weights created through this ABI.
 */
typedef enum sclab_extension {
  /**
   * last + slope·k; parameter is the slope (> 0)
   */
  SCLAB_EXTENSION_LINEAR = 0,
  /**
   * last · ratio^k; parameter is the ratio (> 1)
   */
  SCLAB_EXTENSION_GEOMETRIC = 1,
} sclab_extension;

/**
 * Result of every fallible call in this ABI.
 */
typedef enum sclab_status {
  SCLAB_OK = 0,
  SCLAB_NULL_ARGUMENT = 1,
  SCLAB_INVALID_ARGUMENT = 2,
  SCLAB_DOMAIN_ERROR = 3,
  SCLAB_CONTRACT_ERROR = 4,
  SCLAB_UTF8_ERROR = 5,
  SCLAB_JSON_ERROR = 6,
} sclab_status;

/**
 * Opaque handle to a band-limited loop.
 */
typedef struct sclab_loop sclab_loop;

/**
 * Opaque handle to a weight function.
 */
typedef struct sclab_weight sclab_weight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the underlying library; static storage, do not free.
 */
const char *sclab_version(void);

/**
 * Create the power weight f(ν) = ν^exponent.
 *
 * # Safety
 * `name` must point to a NUL-terminated string and `out` must be a valid
 * pointer to a handle slot.
 */
enum sclab_status sclab_weight_power_new(const char *name,
                                         double exponent,
                                         struct sclab_weight **out);

/**
 * Create a table weight from `len` values continued by the given
 * extension rule.
 *
 * # Safety
 * `name` must be NUL-terminated, `values` must point to `len` readable
 * doubles, and `out` must be a valid pointer to a handle slot.
 */
enum sclab_status sclab_weight_table_new(const char *name,
                                         const double *values,
                                         uintptr_t len,
                                         enum sclab_extension extension,
                                         double parameter,
                                         struct sclab_weight **out);

/**
 * Evaluate f(ν); indices are 1-based.
 *
 * # Safety
 * `weight` must be a live handle from a `sclab_weight_*_new` call and
 * `out` a valid pointer.
 */
enum sclab_status sclab_weight_eval(const struct sclab_weight *weight, uintptr_t nu, double *out);

/**
 * Serialize the weight to its JSON form. The returned string must be
 * released with [`sclab_string_free`].
 *
 * # Safety
 * `weight` must be a live handle and `out` a valid pointer.
 */
enum sclab_status sclab_weight_to_json(const struct sclab_weight *weight, char **out);

/**
 * Exact operator norm of the rank-N cutoff defect from the weighted level
 * into the base level, together with the 1/f(N) reference constant.
 *
 * # Safety
 * `weight` must be a live handle; `out_exact` and `out_paper` must be
 * valid pointers.
 */
enum sclab_status sclab_projection_defect(const struct sclab_weight *weight,
                                          uintptr_t rank,
                                          double *out_exact,
                                          double *out_paper);

/**
 * Release a weight handle. Null is a no-op.
 *
 * # Safety
 * `weight` must be null or a handle not yet freed.
 */
void sclab_weight_free(struct sclab_weight *weight);

/**
 * Create a loop from interleaved (re, im) coefficient pairs for modes
 * −bandwidth..bandwidth; `reim` must hold 2·(2·bandwidth+1) doubles.
 *
 * # Safety
 * `reim` must point to that many readable doubles and `out` must be a
 * valid pointer to a handle slot.
 */
enum sclab_status sclab_loop_new(uintptr_t bandwidth, const double *reim, struct sclab_loop **out);

/**
 * Level-k Sobolev norm (Σ (1+ℓ²)^k |v_ℓ|²)^{1/2}.
 *
 * # Safety
 * `loop_` must be a live handle and `out` a valid pointer.
 */
enum sclab_status sclab_loop_sobolev_norm(const struct sclab_loop *loop_,
                                          uintptr_t level,
                                          double *out);

/**
 * New handle holding the shifted loop v(·+τ).
 *
 * # Safety
 * `loop_` must be a live handle and `out` a valid pointer to a handle
 * slot.
 */
enum sclab_status sclab_loop_shifted(const struct sclab_loop *loop_,
                                     double tau,
                                     struct sclab_loop **out);

/**
 * Closed-form shift defect ‖Ψ_τ v − v‖_{L²}.
 *
 * # Safety
 * `loop_` must be a live handle and `out` a valid pointer.
 */
enum sclab_status sclab_loop_shift_defect(const struct sclab_loop *loop_, double tau, double *out);

/**
 * Release a loop handle. Null is a no-op.
 *
 * # Safety
 * `loop_` must be null or a handle not yet freed.
 */
void sclab_loop_free(struct sclab_loop *loop_);

/**
 * Build the unit step witness for the given τ and grid resolution and
 * report its norm (→ 1) and shift defect (→ √2). Requires (τ/2)·resolution
 * to be an integer.
 *
 * # Safety
 * `out_norm` and `out_defect` must be valid pointers.
 */
enum sclab_status sclab_discontinuity_witness(double tau,
                                              uintptr_t resolution,
                                              double *out_norm,
                                              double *out_defect);

/**
 * Release a string produced by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a string returned by an `sclab_*` call, not yet
 * freed.
 */
void sclab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
