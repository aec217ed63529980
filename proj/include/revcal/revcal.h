/* Copyright 2026 The revcal Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * revcal C API.
 *
 * Every fallible call returns a revcal_status. On failure the message is
 * available from revcal_last_error() on the same thread until the next call.
 * Objects created by revcal_*_create / revcal_*_load / revcal_cmd_* are owned
 * by the caller and released with the matching revcal_*_free.
 */

#ifndef REVCAL_REVCAL_H
#define REVCAL_REVCAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(REVCAL_BUILDING)
#define REVCAL_API __attribute__((visibility("default")))
#else
#define REVCAL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes. */
typedef enum revcal_status {
  REVCAL_OK = 0,
  REVCAL_ERR_INTERNAL = 1,
  REVCAL_ERR_INPUT = 2,
  REVCAL_ERR_INFEASIBLE = 3,
  REVCAL_ERR_CHECK_FAILED = 4
} revcal_status;

REVCAL_API const char* revcal_version(void);
REVCAL_API const char* revcal_last_error(void);

/* ---- Concentration bounds ---------------------------------------------- */

REVCAL_API revcal_status revcal_tail_bound(double t, double sigma_w_sq, double c_max, double* out);
REVCAL_API revcal_status revcal_margin_bound(double gamma, double sigma_w_sq, double c_max,
                                             double* out);
REVCAL_API revcal_status revcal_scalar_uniform_bound(int64_t m, double gamma, double sigma_sq,
                                                     double range_width, double* out);
REVCAL_API revcal_status revcal_dkw_bound(int64_t n, double delta, double* out);
REVCAL_API revcal_status revcal_tau05_error_bound(double eps_pi, double c_min, double flat_width,
                                                  double* out);

/* ---- Aggregation -------------------------------------------------------- */

/* Writes m weights proportional to 1 / projected_variances[i]. */
REVCAL_API revcal_status revcal_gls_weights(const double* projected_variances, size_t m,
                                            double* weights_out);
/* sum_i w_i^2 c_i */
REVCAL_API revcal_status revcal_panel_variance(const double* weights,
                                               const double* projected_variances, size_t m,
                                               double* out);

/* ---- Gaussian posterior ------------------------------------------------- */

typedef struct revcal_gaussian {
  double mean;
  double variance;
} revcal_gaussian;

REVCAL_API revcal_status revcal_posterior_update(revcal_gaussian prior, const double* scores,
                                                 const double* variances, size_t n,
                                                 revcal_gaussian* out);
REVCAL_API revcal_status revcal_acceptance_probability(revcal_gaussian posterior, double tau,
                                                       double* out);
REVCAL_API revcal_status revcal_credible_robust(revcal_gaussian posterior, double tau, double alpha,
                                                int* out);
REVCAL_API revcal_status revcal_solicit_worthwhile(revcal_gaussian posterior, double tau,
                                                   double alpha, double sigma_new_sq, int* out);

/* ---- Detector metrics --------------------------------------------------- */

typedef struct revcal_detector_metrics {
  int has_tpr; /* 0 when there are no positives */
  double tpr;
  int has_fpr; /* 0 when there are no negatives */
  double fpr;
  double accuracy;
  double f1;
} revcal_detector_metrics;

REVCAL_API revcal_status revcal_detector_metrics_compute(int64_t tp, int64_t fp, int64_t tn,
                                                         int64_t fn, revcal_detector_metrics* out);

/* ---- Calibration sets --------------------------------------------------- */

typedef struct revcal_calibration revcal_calibration;

REVCAL_API revcal_status revcal_calibration_create(revcal_calibration** out);
/* Reads a calibration JSONL file; any status label is accepted. */
REVCAL_API revcal_status revcal_calibration_load(const char* path, revcal_calibration** out);
REVCAL_API revcal_status revcal_calibration_add(revcal_calibration* set, const char* id,
                                                double score, int accept, const char* status);
REVCAL_API size_t revcal_calibration_size(const revcal_calibration* set);
/* tau_rate for target_rate and tau_0.5; REVCAL_ERR_INFEASIBLE when the
 * calibrated curve never reaches 1/2 (tau_rate is still written). */
REVCAL_API revcal_status revcal_calibration_fit(const revcal_calibration* set, double target_rate,
                                                double* tau_rate, double* tau_05);
REVCAL_API void revcal_calibration_free(revcal_calibration* set);

/* ---- Batch commands ----------------------------------------------------- */

typedef struct revcal_options revcal_options;
typedef struct revcal_run revcal_run;

REVCAL_API revcal_status revcal_options_create(revcal_options** out);
REVCAL_API revcal_status revcal_options_set_config(revcal_options* opts, const char* path);
REVCAL_API revcal_status revcal_options_set_out_root(revcal_options* opts, const char* dir);
REVCAL_API revcal_status revcal_options_set_seed(revcal_options* opts, uint64_t seed);
REVCAL_API void revcal_options_free(revcal_options* opts);

/* Each command returns its exit status and, when `run` is non-null, a run
 * record describing the outcome. opts may be null for defaults. */
REVCAL_API revcal_status revcal_cmd_calibrate(const revcal_options* opts,
                                              const char* calibration_path, revcal_run** run);
REVCAL_API revcal_status revcal_cmd_review(const revcal_options* opts, const char* panels_path,
                                           const char* thresholds_path, revcal_run** run);
REVCAL_API revcal_status revcal_cmd_bayes(const revcal_options* opts, const char* panels_path,
                                          const char* thresholds_path, revcal_run** run);
REVCAL_API revcal_status revcal_cmd_detector_eval(const revcal_options* opts,
                                                  const char* panels_path, revcal_run** run);
/* which: "margins", "threshold-error" or "variance". Empty grids and
 * replicates <= 0 keep the configured preset. */
REVCAL_API revcal_status revcal_cmd_simulate(const revcal_options* opts, const char* which,
                                             const int64_t* m_grid, size_t m_count,
                                             const int64_t* n_cal_grid, size_t n_cal_count,
                                             int64_t replicates, revcal_run** run);

/* Unset fields are NaN; revcal_bound_args_init fills every field with NaN. */
typedef struct revcal_bound_args {
  double t, gamma, sigma_w_sq, c_max, m, sigma_sq, range, n, delta, eps_pi, c_min, flat_width;
} revcal_bound_args;

REVCAL_API void revcal_bound_args_init(revcal_bound_args* args);
/* name: "tail", "margin", "scalar", "dkw" or "tau05". */
REVCAL_API revcal_status revcal_cmd_bound(const char* name, const revcal_bound_args* args,
                                          double* value, revcal_run** run);

REVCAL_API int revcal_run_exit_code(const revcal_run* run);
REVCAL_API const char* revcal_run_summary(const revcal_run* run);
REVCAL_API const char* revcal_run_dir(const revcal_run* run);
REVCAL_API const char* revcal_run_error(const revcal_run* run);
REVCAL_API void revcal_run_free(revcal_run* run);

#ifdef __cplusplus
}
#endif

#endif /* REVCAL_REVCAL_H */
