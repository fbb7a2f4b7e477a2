#ifndef SWITCHSTAB_H
#define SWITCHSTAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwsStatus {
  SWS_STATUS_OK = 0,
  SWS_STATUS_NULL_POINTER = 1,
  SWS_STATUS_DOMAIN = 2,
  SWS_STATUS_NOT_HURWITZ = 3,
  SWS_STATUS_NO_HYPERBOLIC_SPLIT = 4,
  SWS_STATUS_NUMERICAL_DEGENERACY = 5,
  SWS_STATUS_NO_TRANSITION = 6,
  SWS_STATUS_NOT_SPD = 7,
  SWS_STATUS_QUADRATURE = 8,
  SWS_STATUS_PANIC = 99,
} SwsStatus;

typedef enum SwsCase {
  SWS_CASE_A = 0,
  SWS_CASE_B = 1,
  SWS_CASE_C = 2,
  SWS_CASE_D = 3,
  SWS_CASE_E = 4,
  SWS_CASE_F = 5,
  SWS_CASE_ERGODIC_NO_ZEROS = 6,
} SwsCase;

typedef enum SwsVerdict {
  SWS_VERDICT_UNIQUE_INVARIANT_MEASURE = 0,
  SWS_VERDICT_TWO_RECURRENT_CLASSES = 1,
} SwsVerdict;

// Exactly solvable family (rotations or Jordan).
typedef struct SwsModel SwsModel;

// Switched system `(A0, A1, λ, β)`.
typedef struct SwsSystem SwsSystem;

typedef struct SwsCriterion {
  double lhs;
  double rhs;
  bool holds;
  bool boundary;
  bool has_window;
  double window_lo;
  double window_hi;
} SwsCriterion;

typedef struct SwsEstimate {
  double value;
  double std_error;
} SwsEstimate;

typedef struct SwsCertificate {
  double rho;
  double kappa0;
  double kappa1;
  // `INFINITY` when `beta1_finite` is false.
  double beta1;
  bool beta1_finite;
} SwsCertificate;

typedef struct SwsClassification {
  enum SwsCase label;
  enum SwsVerdict verdict;
  bool swapped;
  bool degenerate;
  bool has_interval;
  double interval_start;
  double interval_end;
} SwsClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into this library on the same thread.
const char *sws_last_error_message(void);

// # Safety
// `a0`, `a1` point to 4 doubles; `out` is writable.
enum SwsStatus sws_system_new(const double *a0,
                              const double *a1,
                              double lam,
                              double beta,
                              struct SwsSystem **out);

// # Safety
// `sys` is null or came from `sws_system_new` and was not freed.
void sws_system_free(struct SwsSystem *sys);

// # Safety
// `out` is writable.
enum SwsStatus sws_model_rotations(double a, double b, struct SwsModel **out);

// # Safety
// `out` is writable.
enum SwsStatus sws_model_jordan(double b, struct SwsModel **out);

// # Safety
// `model` is null or came from `sws_model_*` and was not freed.
void sws_model_free(struct SwsModel *model);

// # Safety
// `a0`, `a1` point to 4 doubles; `out` is writable.
enum SwsStatus sws_criterion(const double *a0, const double *a1, struct SwsCriterion *out);

// `out = exp(t a)`.
//
// # Safety
// `a` points to 4 doubles; `out` to 4 writable doubles.
enum SwsStatus sws_expm2(const double *a, double t, double *out);

// Monte Carlo Lyapunov exponent from `(theta0, i0)`.
//
// # Safety
// `sys` is a live handle; `out` is writable.
enum SwsStatus sws_chi_mc(const struct SwsSystem *sys,
                          double theta0,
                          uint8_t i0,
                          double horizon,
                          size_t replicas,
                          uint64_t seed,
                          struct SwsEstimate *out);

// # Safety
// `model` is a live handle; `out` is writable.
enum SwsStatus sws_chi_exact(const struct SwsModel *model, double beta, double *out);

// # Safety
// `model` is a live handle; `out` is writable.
enum SwsStatus sws_beta_c(const struct SwsModel *model, double tol, double *out);

// # Safety
// `a0`, `a1` point to 4 doubles; `out` is writable.
enum SwsStatus sws_certificate(const double *a0,
                               const double *a1,
                               double lam,
                               struct SwsCertificate *out);

// Per-step exponent of the embedded-chain matrix product. `variant` is an
// [`SwsProductVariant`] value.
//
// # Safety
// `sys` is a live handle; `out` is writable.
enum SwsStatus sws_product_lyapunov(const struct SwsSystem *sys,
                                    uint32_t variant,
                                    size_t steps,
                                    size_t replicas,
                                    uint64_t seed,
                                    struct SwsEstimate *out);

// # Safety
// `a0`, `a1` point to 4 doubles; `out` is writable.
enum SwsStatus sws_classify(const double *a0,
                            const double *a1,
                            double lam,
                            struct SwsClassification *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWITCHSTAB_H */
