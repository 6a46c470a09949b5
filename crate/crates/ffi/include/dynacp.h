#ifndef DYNACP_H
#define DYNACP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DcpStatus {
  DCP_STATUS_OK = 0,
  DCP_STATUS_INVALID_ARGUMENT = 1,
  DCP_STATUS_NULL_POINTER = 2,
  DCP_STATUS_CONVERGENCE = 3,
  DCP_STATUS_EXTRAPOLATION_UNRELIABLE = 4,
  DCP_STATUS_CONFIG = 5,
  DCP_STATUS_IO = 6,
  DCP_STATUS_PANIC = 7,
} DcpStatus;

typedef enum DcpMollifier {
  DCP_MOLLIFIER_LORENTZIAN = 0,
  DCP_MOLLIFIER_GAUSSIAN = 1,
} DcpMollifier;

typedef enum DcpField {
  DCP_FIELD_ELECTRIC = 0,
  DCP_FIELD_MAGNETIC = 1,
  DCP_FIELD_TOTAL = 2,
} DcpField;

/**
 * Opaque model parameters.
 */
typedef struct DcpModel DcpModel;

typedef struct DcpDensity {
  double electric;
  double magnetic;
  double total;
  bool far_zone;
} DcpDensity;

typedef struct DcpPotential {
  double delta_v;
  double force;
  double force_error;
  bool far_zone;
} DcpPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model. Reduced units; `dipole` points to three components.
 *
 * # Safety
 * `dipole` must point to three readable doubles and `out` must be writable.
 */
enum DcpStatus dcp_model_new(double omega0,
                             double delta_omega0,
                             const double *dipole,
                             double light_speed,
                             double alpha_test,
                             struct DcpModel **out);

/**
 * Model with `omega0 = c = |d| = alpha = 1` and `delta_omega0 = 0.01`.
 */
struct DcpModel *dcp_model_default(void);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void dcp_model_free(struct DcpModel *model);

/**
 * Closed-form electric, magnetic and total density changes at `(r, t)`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DcpStatus dcp_closedform_density(const struct DcpModel *model,
                                      double r,
                                      double t,
                                      enum DcpMollifier family,
                                      double width,
                                      struct DcpDensity *out);

/**
 * Quadrature-engine density changes under the regulator `exp(-eta k)`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DcpStatus dcp_quadrature_density(const struct DcpModel *model,
                                      double r,
                                      double t,
                                      double eta,
                                      struct DcpDensity *out);

/**
 * Potential and force changes on the test atom from the closed forms.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DcpStatus dcp_potential(const struct DcpModel *model,
                             double r,
                             double t,
                             enum DcpMollifier family,
                             double width,
                             struct DcpPotential *out);

/**
 * Exact profile coefficients as six numerator/denominator pairs, ordered
 * step, delta, delta', delta'', delta''', delta''''.
 *
 * # Safety
 * `numerators` and `denominators` must each hold six values; `sign` must
 * be writable.
 */
enum DcpStatus dcp_coefficients(enum DcpField field,
                                int64_t *numerators,
                                int64_t *denominators,
                                int32_t *sign);

/**
 * Message of the last failure on this thread, or null. Owned by the
 * library; valid until the next failing call on the same thread.
 */
const char *dcp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dcp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNACP_H */
