/*
 * C interface of the qsrdg library: structure-preserving (discrete-gradient)
 * time integration of QSR-dissipative systems and the four benchmark systems.
 *
 * Conventions
 *  - Every fallible call returns a qsrdg_status; QSRDG_OK is zero.
 *  - On failure, qsrdg_last_error_message() describes the error. The message
 *    is thread-local and valid until the next failing call on that thread.
 *  - Handles are opaque and immutable once created; a handle may be shared
 *    between threads for read-only calls. Destroy functions accept NULL.
 *  - Output arrays are caller-owned; pass their length so the library can
 *    check it.
 */
#ifndef QSRDG_H
#define QSRDG_H

#include <stddef.h>

#if defined(_WIN32)
#  ifdef QSRDG_BUILDING_LIBRARY
#    define QSRDG_API __declspec(dllexport)
#  else
#    define QSRDG_API __declspec(dllimport)
#  endif
#else
#  define QSRDG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsrdg_status {
  QSRDG_OK = 0,
  QSRDG_ERR_INVALID_ARGUMENT = 1,
  QSRDG_ERR_DIMENSION_MISMATCH = 2,
  QSRDG_ERR_SINGULAR_MATRIX = 3,
  QSRDG_ERR_NON_FINITE = 4,
  QSRDG_ERR_ZERO_DIRECTION = 5,
  QSRDG_ERR_NEWTON_NOT_CONVERGED = 6,
  QSRDG_ERR_GRID_MISMATCH = 7,
  QSRDG_ERR_ARE_NOT_CONVERGED = 8,
  QSRDG_ERR_NOT_STABILIZING = 9,
  QSRDG_ERR_UNKNOWN_EXAMPLE = 10,
  QSRDG_ERR_INTERNAL = 99
} qsrdg_status;

typedef enum qsrdg_scheme {
  QSRDG_SCHEME_DG = 0,       /* discrete-gradient QSR scheme */
  QSRDG_SCHEME_MIDPOINT = 1  /* implicit midpoint rule */
} qsrdg_scheme;

typedef enum qsrdg_dg_kind {
  QSRDG_DG_GONZALEZ = 0,
  QSRDG_DG_ITOH_ABE = 1,
  QSRDG_DG_MEAN_VALUE = 2
} qsrdg_dg_kind;

typedef enum qsrdg_jacobian_mode {
  QSRDG_JACOBIAN_DUAL = 0,
  QSRDG_JACOBIAN_CENTRAL_DIFFERENCE = 1
} qsrdg_jacobian_mode;

typedef enum qsrdg_input_rule {
  QSRDG_INPUT_TRAPEZOIDAL = 0,
  QSRDG_INPUT_MIDPOINT_SAMPLE = 1
} qsrdg_input_rule;

typedef struct qsrdg_config {
  int scheme;                /* qsrdg_scheme */
  int dg_kind;               /* qsrdg_dg_kind */
  int mean_value_order;      /* 1..10, used by QSRDG_DG_MEAN_VALUE */
  int max_newton_iterations; /* >= 1 */
  double newton_tolerance;   /* absolute bound on the residual norm */
  int jacobian_mode;         /* qsrdg_jacobian_mode */
  double gradient_floor;     /* relative to 1 + |grad H(z_i)| */
  int input_rule;            /* qsrdg_input_rule */
} qsrdg_config;

/* Example flags for qsrdg_example_create. */
#define QSRDG_EXAMPLE_ZERO_INPUT 0x1u     /* use u = 0 instead of the benchmark control */
#define QSRDG_EXAMPLE_PI_TWO_CHANNEL 0x2u /* PI controller with two channels */

typedef struct qsrdg_example qsrdg_example;
typedef struct qsrdg_trajectory qsrdg_trajectory;

QSRDG_API const char* qsrdg_version(void);
QSRDG_API const char* qsrdg_status_name(qsrdg_status status);
QSRDG_API const char* qsrdg_last_error_message(void);
/* Index of the failing step of the last failed integration, or -1. */
QSRDG_API long qsrdg_last_error_step(void);

/* Gonzalez discrete gradient, midpoint averages, trapezoidal input,
 * ten Newton steps with tolerance 1e-13, dual-number Jacobians. */
QSRDG_API void qsrdg_config_default(qsrdg_config* config);

/* Benchmark systems: "pendulum", "lti-ocp", "pi", "synthetic". */
QSRDG_API qsrdg_status qsrdg_example_create(const char* name, unsigned flags,
                                            qsrdg_example** out);
QSRDG_API void qsrdg_example_destroy(qsrdg_example* example);
QSRDG_API size_t qsrdg_example_state_dim(const qsrdg_example* example);
QSRDG_API size_t qsrdg_example_input_dim(const qsrdg_example* example);
QSRDG_API qsrdg_status qsrdg_example_initial_state(const qsrdg_example* example, double* z0,
                                                   size_t n);
QSRDG_API qsrdg_status qsrdg_example_control(const qsrdg_example* example, double t, double* u,
                                             size_t m);
QSRDG_API qsrdg_status qsrdg_example_storage(const qsrdg_example* example, const double* z,
                                             size_t n, double* value);
/* Absolute residuals of the three Hill-Moylan conditions at z. */
QSRDG_API qsrdg_status qsrdg_example_hill_moylan(const qsrdg_example* example, const double* z,
                                                 size_t n, double residuals[3]);
QSRDG_API qsrdg_status qsrdg_example_power_balance_residual(const qsrdg_example* example,
                                                            const double* z, size_t n,
                                                            const double* u, size_t m,
                                                            double* residual);

/* Integrates the example from its initial state with its control on the
 * equidistant grid t_i = i T / q. */
QSRDG_API qsrdg_status qsrdg_integrate(const qsrdg_example* example, const qsrdg_config* config,
                                       double final_time, size_t steps, qsrdg_trajectory** out);
/* Same on an arbitrary grid 0 = t_0 < ... < t_q (count = q + 1). */
QSRDG_API qsrdg_status qsrdg_integrate_grid(const qsrdg_example* example,
                                            const qsrdg_config* config, const double* times,
                                            size_t count, qsrdg_trajectory** out);
/* A states-only trajectory (no step data), e.g. a reference loaded from disk.
 * `states` holds count rows of n values. */
QSRDG_API qsrdg_status qsrdg_trajectory_from_states(const double* times, size_t count,
                                                    const double* states, size_t n,
                                                    qsrdg_trajectory** out);
QSRDG_API void qsrdg_trajectory_destroy(qsrdg_trajectory* trajectory);

QSRDG_API size_t qsrdg_trajectory_steps(const qsrdg_trajectory* trajectory);
QSRDG_API size_t qsrdg_trajectory_state_dim(const qsrdg_trajectory* trajectory);
QSRDG_API size_t qsrdg_trajectory_input_dim(const qsrdg_trajectory* trajectory);
/* 1 if the trajectory carries per-step data (inputs, outputs, residuals). */
QSRDG_API int qsrdg_trajectory_has_step_data(const qsrdg_trajectory* trajectory);
QSRDG_API size_t qsrdg_trajectory_unconverged_steps(const qsrdg_trajectory* trajectory);
QSRDG_API qsrdg_status qsrdg_trajectory_time(const qsrdg_trajectory* trajectory, size_t i,
                                             double* t);
QSRDG_API qsrdg_status qsrdg_trajectory_state(const qsrdg_trajectory* trajectory, size_t i,
                                              double* z, size_t n);
/* Step data, i < steps. */
QSRDG_API qsrdg_status qsrdg_trajectory_averaged_input(const qsrdg_trajectory* trajectory,
                                                       size_t i, double* u, size_t m);
QSRDG_API qsrdg_status qsrdg_trajectory_discrete_output(const qsrdg_trajectory* trajectory,
                                                        size_t i, double* y, size_t m);
QSRDG_API qsrdg_status qsrdg_trajectory_newton_residual(const qsrdg_trajectory* trajectory,
                                                        size_t i, double* residual);
QSRDG_API qsrdg_status qsrdg_trajectory_newton_iterations(const qsrdg_trajectory* trajectory,
                                                          size_t i, int* iterations);

/* Absolute discrete power-balance defect of every step; `out` has length
 * steps. The trajectory must come from integrating `example`. */
QSRDG_API qsrdg_status qsrdg_balance_residuals(const qsrdg_example* example,
                                               const qsrdg_trajectory* trajectory, double* out,
                                               size_t len);
/* max_i |z_ref(t_i) - z_i| / max_i |z_ref(t_i)| over the nodes of `trajectory`. */
QSRDG_API qsrdg_status qsrdg_relative_error(const qsrdg_trajectory* trajectory,
                                            const qsrdg_trajectory* reference, double* error);

#ifdef __cplusplus
}
#endif

#endif /* QSRDG_H */
