#ifndef COSPM_H
#define COSPM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Constant friction-equivalent step on every actuator input.
#define COSPM_MODE_UNIT_STEP 0

// Smoothed Coulomb friction opposing the joint rate.
#define COSPM_MODE_COULOMB 1

// No actuator input disturbance.
#define COSPM_MODE_NONE 2

typedef enum CospmStatus {
  COSPM_STATUS_OK = 0,
  COSPM_STATUS_NULL_POINTER = 1,
  COSPM_STATUS_INVALID_INPUT = 2,
  COSPM_STATUS_NO_REAL_SOLUTION = 3,
  COSPM_STATUS_NO_CONVERGENCE = 4,
  COSPM_STATUS_SINGULAR = 5,
  COSPM_STATUS_NO_CROSSING = 6,
  COSPM_STATUS_SIMULATION = 7,
  COSPM_STATUS_IO = 8,
  COSPM_STATUS_OUT_OF_RANGE = 9,
  COSPM_STATUS_PANIC = 10,
} CospmStatus;

// Manipulator geometry.
typedef struct CospmDesign CospmDesign;

// A completed simulation run.
typedef struct CospmTrace CospmTrace;

typedef struct CospmCertification {
  bool all_pass;
  size_t tested;
  size_t failures;
  size_t leaves;
  double max_h;
} CospmCertification;

typedef struct CospmMargins {
  double gain_margin_db;
  double phase_margin_deg;
  // rad/s
  double gain_crossover;
  // rad/s
  double phase_crossover;
} CospmMargins;

// Closed-loop run settings; controller coefficients are the reference ones.
typedef struct CospmSimulationOptions {
  double duration;
  double sample_period;
  uint32_t substeps;
  double wave_amplitude[3];
  // Hz
  double wave_frequency[3];
  double wave_phase[3];
  double tau_m;
  double friction[3];
  // One of the `COSPM_MODE_*` constants.
  uint32_t mode;
} CospmSimulationOptions;

typedef struct CospmSample {
  double t;
  double omega[3];
  double eps[3];
  double eps_omega[3];
  double theta[3];
  double theta_dot[3];
  double chi[3];
  double carrier[3];
} CospmSample;

typedef struct CospmSteadyState {
  double max_abs_residual;
  double max_abs_speed_error;
  double max_abs_joint_rate;
} CospmSteadyState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *cospm_last_error_message(void);

// Static NUL-terminated version string.
const char *cospm_version(void);

// The reference coaxial design.
struct CospmDesign *cospm_design_new_reference(void);

// A design from its nine angles, each array holding three values.
//
// # Safety
// Array pointers must reference three readable doubles; `out` must be writable.
enum CospmStatus cospm_design_new(const double *alpha1,
                                  const double *alpha2,
                                  const double *eta,
                                  double beta1,
                                  double beta2,
                                  struct CospmDesign **out);

// # Safety
// `design` must come from a `cospm_design_new*` call and not be freed yet.
void cospm_design_free(struct CospmDesign *design);

// Closure residual `f(θ, χ)`.
//
// # Safety
// `theta`, `chi` and `out` must each reference three doubles.
enum CospmStatus cospm_closure(const struct CospmDesign *design,
                               const double *theta,
                               const double *chi,
                               double *out);

// Inverse geometric model. `reference` selects, per leg, the root nearest
// to it; NULL means the home joints.
//
// # Safety
// `chi` and `theta_out` must reference three doubles; `reference` may be NULL.
enum CospmStatus cospm_igm(const struct CospmDesign *design,
                           const double *chi,
                           const double *reference,
                           double *theta_out);

// Forward geometric model by Newton iteration from `seed`.
//
// # Safety
// `theta`, `seed` and `chi_out` must reference three doubles.
enum CospmStatus cospm_fgm(const struct CospmDesign *design,
                           const double *theta,
                           const double *seed,
                           double *chi_out);

// `J` with `χ̇ = J θ̇`, written row-major into nine doubles.
//
// # Safety
// `theta` and `chi` must reference three doubles, `j_out` nine.
enum CospmStatus cospm_jacobian(const struct CospmDesign *design,
                                const double *theta,
                                const double *chi,
                                double *j_out);

// Kantorovich certification of a bank × elevation box at bearing 0.
//
// # Safety
// `out` must be writable.
enum CospmStatus cospm_certify_workspace(const struct CospmDesign *design,
                                         double bank_min,
                                         double bank_max,
                                         double elevation_min,
                                         double elevation_max,
                                         double step,
                                         struct CospmCertification *out);

// Gain and phase margins of the reference speed loop for actuator time
// constant `tau_m` and sample period `sample_period`.
//
// # Safety
// `out` must be writable.
enum CospmStatus cospm_margins(double tau_m, double sample_period, struct CospmMargins *out);

// Fills `out` with the reference experiment settings.
//
// # Safety
// `out` must be writable.
enum CospmStatus cospm_simulation_options_default(struct CospmSimulationOptions *out);

// Runs the closed-loop experiment from the home pose.
//
// # Safety
// `options` must be readable and `out` writable. On success `*out` owns a
// trace released with [`cospm_trace_free`].
enum CospmStatus cospm_simulate(const struct CospmDesign *design,
                                const struct CospmSimulationOptions *options,
                                struct CospmTrace **out);

// Number of samples in a trace; 0 for NULL.
//
// # Safety
// `trace` must be NULL or a live handle.
size_t cospm_trace_len(const struct CospmTrace *trace);

// # Safety
// `trace` must be a live handle and `out` writable.
enum CospmStatus cospm_trace_sample(const struct CospmTrace *trace,
                                    size_t index,
                                    struct CospmSample *out);

// Maxima over samples at or after `t_start`.
//
// # Safety
// `trace` must be a live handle and `out` writable.
enum CospmStatus cospm_trace_steady_state(const struct CospmTrace *trace,
                                          double t_start,
                                          struct CospmSteadyState *out);

// Writes the trace as CSV to a UTF-8 path.
//
// # Safety
// `trace` must be a live handle and `path` a NUL-terminated string.
enum CospmStatus cospm_trace_write_csv(const struct CospmTrace *trace, const char *path);

// # Safety
// `trace` must come from [`cospm_simulate`] and not be freed yet.
void cospm_trace_free(struct CospmTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COSPM_H */
