#ifndef VQNS_H
#define VQNS_H

/* C interface to the noise-spectroscopy core. All functions return a
 * vqns_status; on any non-zero status vqns_last_error() yields a
 * human-readable message for the calling thread. Opaque handles are created
 * and released by the matching _create/_free pairs and are not thread-safe
 * for concurrent mutation, but read-only use from several threads is fine.
 *
 * Units: frequencies in the reference unit omega_0, times in 1/omega_0,
 * spectral densities in 1/omega_0. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VQNS_API __declspec(dllexport)
#else
#define VQNS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vqns_status {
  VQNS_OK = 0,
  VQNS_ERR_INVALID_ARGUMENT = 1,
  VQNS_ERR_TOLERANCE = 2,      /* quadrature tolerance not certified */
  VQNS_ERR_DIVERGENCE = 3,     /* e.g. 1/f spectrum at omega = 0 */
  VQNS_ERR_OVERFLOW_GUARD = 4, /* non-finite intermediate detected */
  VQNS_ERR_IO = 5,
  VQNS_ERR_PARSE = 6,
  VQNS_ERR_ALL_RUNS_FAILED = 7, /* no ensemble run converged */
  VQNS_ERR_INTERNAL = 99
} vqns_status;

/* Message for the most recent failure on this thread; empty string if the
 * last call succeeded. The pointer stays valid until the next API call on
 * the same thread. */
VQNS_API const char* vqns_last_error(void);

/* --- Spectrum models (sums of symmetrized Lorentzians) ----------------- */

typedef struct vqns_spectrum vqns_spectrum;

/* terms: n_terms triples (B, d, omega_c). */
VQNS_API vqns_status vqns_spectrum_create(const double* terms, size_t n_terms,
                                          vqns_spectrum** out);
VQNS_API void vqns_spectrum_free(vqns_spectrum* spectrum);

VQNS_API vqns_status vqns_spectrum_eval(const vqns_spectrum* spectrum,
                                        const double* omega, size_t n,
                                        double* out);

/* --- Forward model ------------------------------------------------------ */

/* Filter function F(omega, t); n_pulses = 0 selects FID. */
VQNS_API vqns_status vqns_filter_function(int n_pulses, double omega, double t,
                                          double* out);

/* Attenuation exponent chi(t) via the closed forms. */
VQNS_API vqns_status vqns_chi_analytic(const vqns_spectrum* spectrum,
                                       int n_pulses, double t, double* out);

/* chi(t) via adaptive quadrature of the spectral integral (the oracle
 * path). Pass abs_tol/rel_tol <= 0 for the defaults (1e-10 / 1e-8). */
VQNS_API vqns_status vqns_chi_quadrature(const vqns_spectrum* spectrum,
                                         int n_pulses, double t,
                                         double abs_tol, double rel_tol,
                                         double* out);

/* Coherence C(t_k) = exp(-chi(t_k)) at n times. */
VQNS_API vqns_status vqns_coherence(const vqns_spectrum* spectrum,
                                    int n_pulses, const double* times,
                                    size_t n, double* out);

/* --- Measurement sets ---------------------------------------------------- */

typedef struct vqns_measurements vqns_measurements;

VQNS_API vqns_status vqns_measurements_create(vqns_measurements** out);
VQNS_API vqns_status vqns_measurements_load(const char* manifest_path,
                                            vqns_measurements** out);
VQNS_API vqns_status vqns_measurements_add_curve(vqns_measurements* set,
                                                 int n_pulses,
                                                 const double* times,
                                                 const double* values,
                                                 size_t n);
VQNS_API vqns_status vqns_measurements_curve_count(
    const vqns_measurements* set, size_t* out);
VQNS_API void vqns_measurements_free(vqns_measurements* set);

/* --- Ensemble fitting ----------------------------------------------------- */

typedef struct vqns_ensemble vqns_ensemble;

/* optimizer_json: JSON object with optional keys preset, algorithm, lr,
 * beta1, beta2, eps, weight_decay, xi, max_iter, max_restarts (pass "{}"
 * for defaults). threads = 0 honors the VQNS_THREADS environment variable,
 * falling back to the hardware count. */
VQNS_API vqns_status vqns_run_ensemble(const vqns_measurements* set,
                                       int n_basis, const char* optimizer_json,
                                       int n_runs, uint64_t seed,
                                       const double* omega_grid,
                                       size_t grid_len, int threads,
                                       vqns_ensemble** out);

/* mean/std: caller-allocated arrays of the grid length. */
VQNS_API vqns_status vqns_ensemble_stats(const vqns_ensemble* ensemble,
                                         double* mean, double* std_dev);
VQNS_API vqns_status vqns_ensemble_counts(const vqns_ensemble* ensemble,
                                          int* converged, int* failures);

/* Parameters of the converged run with the lowest loss: 3*n_basis doubles
 * (B, d, omega_c per basis term). */
VQNS_API vqns_status vqns_ensemble_best_params(const vqns_ensemble* ensemble,
                                               double* params,
                                               size_t params_len);
VQNS_API void vqns_ensemble_free(vqns_ensemble* ensemble);

/* --- Command layer -------------------------------------------------------- */

/* Runs one pipeline command described by a JSON config (the same schema the
 * CLI builds from its flags; key "command" selects simulate | fit |
 * sensitivity | benchmark | subsample). Writes outputs plus
 * config_echo.json into the config's "out" directory. */
VQNS_API vqns_status vqns_run_command_json(const char* config_json);

/* Reruns a previously written config echo; out_override (may be NULL)
 * redirects the output directory. */
VQNS_API vqns_status vqns_replay(const char* echo_path,
                                 const char* out_override);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VQNS_H */
