#ifndef SISI_H
#define SISI_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SisiLabel {
  SISI_LABEL_LAMBDA1,
  SISI_LABEL_LAMBDA2,
  SISI_LABEL_LAMBDA3,
  SISI_LABEL_LAMBDA4,
  SISI_LABEL_LAMBDA15,
  SISI_LABEL_LAMBDA16,
  SISI_LABEL_LAMBDA17,
  SISI_LABEL_ENDEMIC_LOWER,
  SISI_LABEL_ENDEMIC_UPPER,
  SISI_LABEL_INTERIOR,
} SisiLabel;

typedef enum SisiRootKind {
  SISI_ROOT_KIND_UNIQUE_POSITIVE,
  SISI_ROOT_KIND_TWO_POSITIVE,
  SISI_ROOT_KIND_NO_POSITIVE_ROOT,
} SisiRootKind;

typedef enum SisiStabilityKind {
  SISI_STABILITY_KIND_ATTRACTING,
  SISI_STABILITY_KIND_REPELLING,
  SISI_STABILITY_KIND_SADDLE,
  SISI_STABILITY_KIND_NON_HYPERBOLIC,
} SisiStabilityKind;

typedef enum SisiStatus {
  SISI_STATUS_OK = 0,
  SISI_STATUS_NULL_POINTER,
  SISI_STATUS_INVALID_PARAMETER,
  SISI_STATUS_NOT_IN_SIMPLEX,
  SISI_STATUS_LEFT_SIMPLEX,
  SISI_STATUS_DEGENERATE_PARAMETERS,
  SISI_STATUS_INCONSISTENT_ROOT,
  SISI_STATUS_CONVERGENCE_FAILURE,
  SISI_STATUS_PRECONDITION_VIOLATED,
  SISI_STATUS_NOT_A_FIXED_POINT,
  SISI_STATUS_INVALID_SCENARIO_CONFIG,
  SISI_STATUS_INDEX_OUT_OF_RANGE,
  SISI_STATUS_PANIC,
} SisiStatus;

typedef enum SisiTrajectoryKind {
  SISI_TRAJECTORY_KIND_CONVERGED,
  SISI_TRAJECTORY_KIND_MAX_ITERS,
  SISI_TRAJECTORY_KIND_LEFT_SIMPLEX,
} SisiTrajectoryKind;

// Fixed points and fixed faces of one parameter set.
typedef struct SisiFixedPointSet SisiFixedPointSet;

// Model parameters `b, alpha, beta1, beta2, k1, k2`.
typedef struct SisiParams SisiParams;

// A stored orbit.
typedef struct SisiTrajectory SisiTrajectory;

typedef struct SisiValidation {
  bool is_qso;
  bool is_identity;
  // Bit `i` is set when admissibility condition `i` (0..9) fails.
  uint32_t violated_mask;
} SisiValidation;

// Positive roots of the force equation. For a unique root `lower` and
// `upper` coincide; without a root both are NaN.
typedef struct SisiRoot {
  enum SisiRootKind kind;
  double lower;
  double upper;
  double residual;
} SisiRoot;

typedef struct SisiFixedPoint {
  enum SisiLabel label;
  double point[4];
  double fixedness_residual;
} SisiFixedPoint;

// Jacobian spectrum sorted by decreasing modulus.
typedef struct SisiClassification {
  enum SisiStabilityKind kind;
  double re[4];
  double im[4];
  double moduli[4];
} SisiClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *sisi_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *sisi_version(void);

// Creates a parameter handle. Negative or NaN entries are rejected.
//
// # Safety
// `out` must be null or point to writable storage for one pointer.
enum SisiStatus sisi_params_new(double b,
                                double alpha,
                                double beta1,
                                double beta2,
                                double k1,
                                double k2,
                                struct SisiParams **out);

// # Safety
// `params` must be null or a handle from [`sisi_params_new`] not yet freed.
void sisi_params_free(struct SisiParams *params);

// Checks the nine admissibility conditions.
//
// # Safety
// `params` must be a live handle and `out` writable.
enum SisiStatus sisi_params_validate(const struct SisiParams *params, struct SisiValidation *out);

// Applies the operator once.
//
// # Safety
// `input` must point to 4 readable doubles and `output` to 4 writable ones.
enum SisiStatus sisi_apply(const struct SisiParams *params, const double *input, double *output);

// Iterates from `start` until convergence in sup norm below `tol_conv`,
// departure from the simplex, or `max_iters` steps.
//
// # Safety
// `start` must point to 4 readable doubles and `out` be writable.
enum SisiStatus sisi_iterate(const struct SisiParams *params,
                             const double *start,
                             uint64_t max_iters,
                             double tol_conv,
                             struct SisiTrajectory **out);

// Number of stored iterates, or 0 for a null handle.
//
// # Safety
// `trajectory` must be null or a live handle.
size_t sisi_trajectory_len(const struct SisiTrajectory *trajectory);

// Stored iterate `index` and the step number it was taken at.
//
// # Safety
// `step` must be writable, `point` must hold 4 writable doubles.
enum SisiStatus sisi_trajectory_get(const struct SisiTrajectory *trajectory,
                                    size_t index,
                                    uint64_t *step,
                                    double *point);

// How the run ended. `at_step` is the convergence or exit step, or the
// number of steps taken when the budget ran out.
//
// # Safety
// `kind` and `at_step` must be writable.
enum SisiStatus sisi_trajectory_status(const struct SisiTrajectory *trajectory,
                                       enum SisiTrajectoryKind *kind,
                                       uint64_t *at_step);

// # Safety
// `trajectory` must be null or a live handle.
void sisi_trajectory_free(struct SisiTrajectory *trajectory);

// Solves the interior force equation.
//
// # Safety
// `out` must be writable.
enum SisiStatus sisi_solve_force_equation(const struct SisiParams *params, struct SisiRoot *out);

// Enumerates the fixed points.
//
// # Safety
// `out` must be writable.
enum SisiStatus sisi_fixed_points(const struct SisiParams *params, struct SisiFixedPointSet **out);

// Number of isolated fixed points, or 0 for a null handle.
//
// # Safety
// `set` must be null or a live handle.
size_t sisi_fixed_point_count(const struct SisiFixedPointSet *set);

// # Safety
// `out` must be writable.
enum SisiStatus sisi_fixed_point_get(const struct SisiFixedPointSet *set,
                                     size_t index,
                                     struct SisiFixedPoint *out);

// Number of faces made entirely of fixed points, or 0 for a null handle.
//
// # Safety
// `set` must be null or a live handle.
size_t sisi_fixed_point_face_count(const struct SisiFixedPointSet *set);

// Face `index` as a mask of coordinates pinned to zero: bit 0 for `x`,
// bit 1 for `u`, bit 2 for `y`, bit 3 for `v`. The whole simplex is 0.
//
// # Safety
// `pinned_mask` must be writable.
enum SisiStatus sisi_fixed_point_face_get(const struct SisiFixedPointSet *set,
                                          size_t index,
                                          uint8_t *pinned_mask);

// # Safety
// `set` must be null or a live handle.
void sisi_fixed_point_set_free(struct SisiFixedPointSet *set);

// Classifies a fixed point by its Jacobian spectrum; moduli within
// `unit_circle_tol` of 1 count as non-hyperbolic.
//
// # Safety
// `point` must point to 4 readable doubles and `out` be writable.
enum SisiStatus sisi_classify(const struct SisiParams *params,
                              const double *point,
                              double unit_circle_tol,
                              struct SisiClassification *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SISI_H */
