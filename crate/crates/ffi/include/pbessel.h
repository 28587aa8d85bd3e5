#ifndef PBESSEL_H
#define PBESSEL_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PbStatus {
  PB_STATUS_OK = 0,
  PB_STATUS_NULL_POINTER = 1,
  PB_STATUS_INVALID_ARGUMENT = 2,
  PB_STATUS_DOMAIN = 3,
  PB_STATUS_NO_CONVERGENCE = 4,
  PB_STATUS_OVERFLOW = 5,
  PB_STATUS_PANIC = 6,
} PbStatus;

/**
 * A function on the Riemann surface of log ζ satisfying a monodromic relation.
 */
typedef struct PbEvaluator PbEvaluator;

/**
 * Coefficients A_n of the logarithmic expansion of the Bessel dual at t = −2.
 */
typedef struct PbExpansion PbExpansion;

typedef struct PbComplex {
  double re;
  double im;
} PbComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t pb_last_error(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *pb_status_string(enum PbStatus status);

/**
 * e^ζ √(2ζ/π) K_ν(ζ), with a = 2 and T = 2i cos νπ.
 *
 * # Safety
 * `handle` must be valid for writes.
 */
enum PbStatus pb_evaluator_bessel(double nu, struct PbEvaluator **handle);

/**
 * Recessive solution P of the perturbed equation with coefficients
 * a₀, a₁, …, continued across sheets with multiplier `t`.
 *
 * # Safety
 * `coeffs` must point to `len` values; `handle` must be valid for writes.
 */
enum PbStatus pb_evaluator_pbde(double a,
                                const struct PbComplex *coeffs,
                                size_t len,
                                struct PbComplex t,
                                struct PbEvaluator **handle);

/**
 * # Safety
 * `handle` must come from a `pb_evaluator_*` constructor, or be null.
 */
void pb_evaluator_free(struct PbEvaluator *handle);

/**
 * The pair (a, T) of the relation the evaluator continues with.
 *
 * # Safety
 * `handle` must be a live evaluator; `a` and `t` valid for writes.
 */
enum PbStatus pb_evaluator_params(const struct PbEvaluator *handle, double *a, struct PbComplex *t);

/**
 * Value at ζ = rho·e^{i theta} on any sheet.
 *
 * # Safety
 * `handle` must be a live evaluator; `value` valid for writes.
 */
enum PbStatus pb_evaluator_eval(const struct PbEvaluator *handle,
                                double rho,
                                double theta,
                                struct PbComplex *value);

/**
 * |P(ζe^{iπ}) − P(ζe^{−iπ}) − T e^{−aζ} P(ζ)|.
 *
 * # Safety
 * `handle` must be a live evaluator; `residual` valid for writes.
 */
enum PbStatus pb_evaluator_residual(const struct PbEvaluator *handle,
                                    double rho,
                                    double theta,
                                    double *residual);

/**
 * Stokes multiplier of the perturbed equation from ODE integration at the
 * given real sample points; `dispersion` is the spread across samples.
 *
 * # Safety
 * `coeffs` and `samples` must point to `len` and `n_samples` values;
 * `t` and `dispersion` valid for writes.
 */
enum PbStatus pb_estimate_t(double a,
                            const struct PbComplex *coeffs,
                            size_t len,
                            const double *samples,
                            size_t n_samples,
                            struct PbComplex *t,
                            double *dispersion);

/**
 * Coefficients (S_k, T_k) expressing P on the k-th half-turn sheet through
 * P(ζe^{−iπ}) and P(ζ), exponential factors split off.
 *
 * # Safety
 * `s` and `t_k` must be valid for writes.
 */
enum PbStatus pb_st_coefficients(double a,
                                 struct PbComplex t,
                                 int64_t k,
                                 struct PbComplex *s,
                                 struct PbComplex *t_k);

/**
 * A_0..A_{n_max} for the Bessel dual, with splitting radius r ∈ (0, a].
 *
 * # Safety
 * `handle` must be valid for writes.
 */
enum PbStatus pb_expansion_bessel(double nu, size_t n_max, double r, struct PbExpansion **handle);

/**
 * # Safety
 * `handle` must come from `pb_expansion_bessel`, or be null.
 */
void pb_expansion_free(struct PbExpansion *handle);

/**
 * Number of stored coefficients (n_max + 1).
 *
 * # Safety
 * `handle` must be a live expansion or null (returns 0).
 */
size_t pb_expansion_len(const struct PbExpansion *handle);

/**
 * # Safety
 * `handle` must be a live expansion; `value` valid for writes.
 */
enum PbStatus pb_expansion_coeff(const struct PbExpansion *handle,
                                 size_t n,
                                 struct PbComplex *value);

/**
 * The expansion evaluated at t = −a + rho·e^{i theta} on the sheet given
 * by theta; rho must stay below a.
 *
 * # Safety
 * `handle` must be a live expansion; `value` valid for writes.
 */
enum PbStatus pb_expansion_eval(const struct PbExpansion *handle,
                                double rho,
                                double theta,
                                struct PbComplex *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PBESSEL_H */
