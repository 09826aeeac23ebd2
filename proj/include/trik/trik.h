// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_TRIK_H
#define TRIK_TRIK_H

#include <stddef.h>

#if defined(TRIK_BUILDING_LIBRARY)
#define TRIK_API __attribute__((visibility("default")))
#else
#define TRIK_API
#endif

#ifdef __cplusplus
extern "C"
{
#endif

  // Matrices are row-major. Landmark sets are n x d (one landmark per row).

  typedef enum trik_status
  {
    TRIK_OK = 0,
    TRIK_ERR_INVALID_ARGUMENT = 1,
    TRIK_ERR_DOMAIN = 2,
    TRIK_ERR_NONCONVERGENCE = 3,
    TRIK_ERR_SINGULAR = 4,
    TRIK_ERR_COALESCENCE = 5,
    TRIK_ERR_DIMENSION_MISMATCH = 6,
    TRIK_ERR_IO = 7,
    TRIK_ERR_INTERNAL = 8
  } trik_status;

  typedef enum trik_certification
  {
    TRIK_CERT_UNKNOWN = 0,
    TRIK_CERT_POSITIVE = 1,
    TRIK_CERT_STRICT = 2,
    TRIK_CERT_NEGATIVE = 3
  } trik_certification;

  typedef enum trik_scheme
  {
    TRIK_SCHEME_RK4 = 0,
    TRIK_SCHEME_EULER = 1
  } trik_scheme;

  typedef struct trik_kernel trik_kernel;
  typedef struct trik_hodge trik_hodge;
  typedef struct trik_trajectory trik_trajectory;
  typedef struct trik_flow_grid trik_flow_grid;
  typedef struct trik_fan trik_fan;

  typedef struct trik_pd_verdict
  {
    int positive;
    int strictly;
    double min_h_par;
    double min_h_perp;
    double witness_rho;
    double tolerance;
    double grid_min;
    double grid_max;
    size_t grid_points;
  } trik_pd_verdict;

  typedef struct trik_integrator
  {
    trik_scheme scheme;
    double step;
    int record_every;
  } trik_integrator;

  typedef struct trik_interpolation
  {
    double norm_sq;
    int jitter_applied;
    double jitter;
  } trik_interpolation;

  // Message of the last failed call on this thread ("" if none).
  TRIK_API const char *trik_last_error(void);
  TRIK_API const char *trik_status_name(trik_status status);
  TRIK_API const char *trik_version(void);
  // RK4, step 1e-3, record_every 1.
  TRIK_API trik_integrator trik_integrator_default(void);

  // Kernels.
  // JSON object {"family": ..., "dim": ..., <numeric parameters>}.
  TRIK_API trik_status trik_kernel_from_json(const char *json, trik_kernel **out);
  TRIK_API trik_status trik_kernel_create(const char *family, int dim, const char *const *names,
                                          const double *values, size_t n_params,
                                          trik_kernel **out);
  TRIK_API void trik_kernel_destroy(trik_kernel *k);
  TRIK_API int trik_kernel_dim(const trik_kernel *k);
  TRIK_API const char *trik_kernel_family(const trik_kernel *k);
  TRIK_API double trik_kernel_k0(const trik_kernel *k);
  TRIK_API trik_certification trik_kernel_certification(const trik_kernel *k);
  // Canonical JSON of the specification ("" for derived kernels such as Hodge components).
  TRIK_API const char *trik_kernel_spec_json(const trik_kernel *k);
  // k_par, k_perp and (k_par - k_perp)/r^2 at radius r >= 0; any output may be NULL.
  TRIK_API trik_status trik_kernel_coefficients(const trik_kernel *k, double r, double *k_par,
                                                double *k_perp, double *ktilde);
  TRIK_API trik_status trik_kernel_derivatives(const trik_kernel *k, double r, double *dk_par,
                                               double *dk_perp);
  // Residuals of the curl-free and divergence-free conditions at r > 0.
  TRIK_API trik_status trik_kernel_residuals(const trik_kernel *k, double r, double *curl_free,
                                             double *div_free);
  // out: d x d.
  TRIK_API trik_status trik_kernel_eval(const trik_kernel *k, const double *x, double *out);
  // d/dx^axis with 0-based axis; out: d x d.
  TRIK_API trik_status trik_kernel_partial(const trik_kernel *k, const double *x, int axis,
                                           double *out);

  // Spectral analysis. A NULL grid with n = 0 selects the default grid.
  TRIK_API trik_status trik_default_rho_grid(const trik_kernel *k, size_t n, double *out);
  TRIK_API trik_status trik_default_r_grid(const trik_kernel *k, size_t n, double *out);
  TRIK_API trik_status trik_forward_map(const trik_kernel *k, const double *rho, size_t n,
                                        double *h_par, double *h_perp);
  // *available = 0 when the family has no closed form; outputs are then untouched.
  TRIK_API trik_status trik_closed_form_spectrum(const trik_kernel *k, const double *rho,
                                                 size_t n, double *h_par, double *h_perp,
                                                 int *available);
  // Inverse map of the forward-mapped spectrum on `rho`, evaluated at `r`.
  TRIK_API trik_status trik_round_trip(const trik_kernel *k, const double *rho, size_t n_rho,
                                       const double *r, size_t n_r, double *k_par,
                                       double *k_perp);
  // Certifies and records the verdict on the kernel.
  TRIK_API trik_status trik_certify(trik_kernel *k, const double *rho, size_t n, double tol,
                                    trik_pd_verdict *out);
  // CSV rho,h_par,h_perp of the forward map on the grid.
  TRIK_API trik_status trik_write_spectrum_csv(const trik_kernel *k, const double *rho, size_t n,
                                               const char *path);

  // Hodge decomposition. Empty grids select the defaults.
  TRIK_API trik_status trik_hodge_split(const trik_kernel *k, const double *rho, size_t n_rho,
                                        const double *r, size_t n_r, trik_hodge **out);
  TRIK_API void trik_hodge_destroy(trik_hodge *h);
  TRIK_API size_t trik_hodge_size(const trik_hodge *h);
  // Each output has trik_hodge_size entries, the first at r = 0; any may be NULL.
  TRIK_API void trik_hodge_table(const trik_hodge *h, double *r, double *k1_par, double *k1_perp,
                                 double *k2_par, double *k2_perp);
  TRIK_API int trik_hodge_heavy_tail(const trik_hodge *h);
  TRIK_API const char *trik_hodge_warning(const trik_hodge *h);
  // which = 0: curl-free part, 1: divergence-free part. The caller owns the returned kernel.
  TRIK_API trik_status trik_hodge_component(const trik_hodge *h, int which, trik_kernel **out);
  // Integral over the ball of radius R of (k1(x)a).(k2(x)a) for a unit vector a.
  TRIK_API trik_status trik_l2_inner_product(const trik_kernel *k1, const trik_kernel *k2,
                                             double radius, double *out);

  // Fields generated by n centers with momenta (both n x d).
  TRIK_API trik_status trik_field_eval(const trik_kernel *k, size_t n, const double *centers,
                                       const double *momenta, size_t n_points,
                                       const double *points, double *out);
  TRIK_API trik_status trik_divergence(const trik_kernel *k, const double *x, const double *alpha,
                                       double *out);
  TRIK_API trik_status trik_curl_magnitude(const trik_kernel *k, const double *x,
                                           const double *alpha, double *out);
  // d = 2: scalar curl; d = 3: curl vector (3 entries).
  TRIK_API trik_status trik_curl(const trik_kernel *k, const double *x, const double *alpha,
                                 double *out);
  // Block kernel matrix (n d) x (n d).
  TRIK_API trik_status trik_block_matrix(const trik_kernel *k, size_t n, const double *points,
                                         double *out);
  // Minimal-norm interpolation; momenta_out is n x d.
  TRIK_API trik_status trik_interpolate(const trik_kernel *k, size_t n, const double *points,
                                        const double *targets, double *momenta_out,
                                        trik_interpolation *info);
  // Grid with counts[i] points per axis over [lower, upper]; last axis fastest.
  TRIK_API trik_status trik_write_field_csv(const trik_kernel *k, size_t n, const double *centers,
                                            const double *momenta, const double *lower,
                                            const double *upper, const int *counts,
                                            const char *path);

  // Dynamics.
  TRIK_API trik_status trik_hamiltonian(const trik_kernel *k, size_t n, const double *q,
                                        const double *p, double *out);
  TRIK_API trik_status trik_hamilton_rhs(const trik_kernel *k, size_t n, const double *q,
                                         const double *p, double *dq, double *dp);
  TRIK_API trik_status trik_shoot(const trik_kernel *k, size_t n, const double *q0,
                                  const double *p0, const trik_integrator *cfg,
                                  trik_trajectory **out);
  TRIK_API void trik_trajectory_destroy(trik_trajectory *traj);
  TRIK_API size_t trik_trajectory_samples(const trik_trajectory *traj);
  TRIK_API size_t trik_trajectory_landmarks(const trik_trajectory *traj);
  TRIK_API int trik_trajectory_dim(const trik_trajectory *traj);
  // q, p: n x d; any output may be NULL.
  TRIK_API trik_status trik_trajectory_state(const trik_trajectory *traj, size_t index, double *t,
                                             double *q, double *p, double *hamiltonian);
  // max_t |H(t) - H(0)|.
  TRIK_API double trik_trajectory_max_drift(const trik_trajectory *traj);
  TRIK_API trik_status trik_path_energy(const trik_kernel *k, const trik_trajectory *traj,
                                        double *out);
  TRIK_API trik_status trik_trajectory_write_csv(const trik_trajectory *traj, const char *path);
  TRIK_API trik_status trik_trajectory_read_csv(const char *path, trik_trajectory **out);

  TRIK_API trik_status trik_flow_grid_compute(const trik_kernel *k, const trik_trajectory *traj,
                                              const double *lower, const double *upper,
                                              const int *counts, const trik_integrator *cfg,
                                              trik_flow_grid **out);
  TRIK_API void trik_flow_grid_destroy(trik_flow_grid *g);
  TRIK_API size_t trik_flow_grid_size(const trik_flow_grid *g);
  // original, transported: d entries; any output may be NULL.
  TRIK_API trik_status trik_flow_grid_point(const trik_flow_grid *g, size_t index,
                                            double *original, double *transported, double *det,
                                            double *tangent_det);
  TRIK_API double trik_flow_grid_max_det_deviation(const trik_flow_grid *g);
  TRIK_API double trik_flow_grid_max_tangent_deviation(const trik_flow_grid *g);
  TRIK_API trik_status trik_flow_grid_write_csv(const trik_flow_grid *g, const char *path);

  // One shoot per parameter; momenta holds n_params blocks of n x d.
  TRIK_API trik_status trik_exp_map_fan(const trik_kernel *k, size_t n, const double *q0,
                                        size_t n_params, const double *params,
                                        const double *momenta, const trik_integrator *cfg,
                                        trik_fan **out);
  TRIK_API void trik_fan_destroy(trik_fan *fan);
  TRIK_API size_t trik_fan_size(const trik_fan *fan);
  TRIK_API double trik_fan_param(const trik_fan *fan, size_t index);
  // NULL when the shoot failed; the trajectory is owned by the fan.
  TRIK_API const trik_trajectory *trik_fan_trajectory(const trik_fan *fan, size_t index);
  // "" on success.
  TRIK_API const char *trik_fan_error(const trik_fan *fan, size_t index);

#ifdef __cplusplus
}
#endif

#endif  // TRIK_TRIK_H
