/* Copyright 2026 The bayesrom Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef BAYESROM_H
#define BAYESROM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BR_API __declspec(dllexport)
#else
#define BR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns BR_OK or an error code; br_last_error() then holds the
 * message of the failure on the calling thread. */
typedef enum br_status {
  BR_OK = 0,
  BR_INVALID_ARGUMENT = 1,
  BR_DIMENSION_MISMATCH = 2,
  BR_CONFIG = 3,
  BR_IO = 4,
  BR_NON_POSITIVE_EIGENVALUE = 5,
  BR_RANK_DEFICIENT = 6,
  BR_SINGULAR_SYSTEM = 7,
  BR_ALL_UNSTABLE = 8,
  BR_STEP_SIZE_UNDERFLOW = 9,
  BR_NEWTON_DIVERGENCE = 10,
  BR_NONPHYSICAL_STATE = 11,
  BR_MISSING_INPUTS = 12,
  BR_PREDICTION_FAILED = 13,
  BR_INTERNAL = 14
} br_status;

typedef struct br_config br_config;
typedef struct br_run br_run;

BR_API const char* br_version(void);
BR_API const char* br_status_string(br_status status);
BR_API const char* br_last_error(void);

/* ---- experiment configuration ---- */

BR_API int br_builtin_count(void);
/* NULL when index is out of range. */
BR_API const char* br_builtin_name(int index);

BR_API br_status br_config_builtin(const char* name, br_config** out);
BR_API br_status br_config_load(const char* path, br_config** out);
BR_API br_status br_config_from_json(const char* text, br_config** out);
BR_API br_status br_config_set_seed(br_config* config, uint64_t seed);
BR_API br_status br_config_set_samples(br_config* config, int n_samples);
BR_API br_status br_config_write(const br_config* config, const char* path);
BR_API void br_config_free(br_config* config);

/* ---- workflow ---- */

/* Clean trajectories as clean_<k>.csv in out_dir. */
BR_API br_status br_simulate(const br_config* config, const char* out_dir);
/* Reads clean_<k>.csv from in_dir, writes observed_<k>.csv to out_dir. */
BR_API br_status br_noise(const br_config* config, const char* in_dir, const char* out_dir);
/* Reads <prefix>_<k>.csv (prefix NULL means "observed") and writes
 * config.json, model.json, posterior.json and manifest.json to run_dir. */
BR_API br_status br_fit(const br_config* config, const char* data_dir, const char* prefix,
                        const char* run_dir);
/* Simulate, noise, fit, predict and report into run_dir. */
BR_API br_status br_experiment(const br_config* config, const char* run_dir);

BR_API br_status br_run_load(const char* run_dir, br_run** out);
BR_API br_status br_run_set_seed(br_run* run, uint64_t seed);
BR_API br_status br_run_set_samples(br_run* run, int n_samples);
/* Prediction summaries for every case into out_dir. */
BR_API br_status br_predict(const br_run* run, const char* out_dir);
/* Report CSVs from the summaries previously written to dir by br_predict. */
BR_API br_status br_report(const br_run* run, const char* dir);
BR_API void br_run_free(br_run* run);

/* Posterior rows and the width d of each row. */
BR_API br_status br_run_shape(const br_run* run, size_t* rows, size_t* width);
/* mean holds width values, covariance width * width values (row-major);
 * either may be NULL. */
BR_API br_status br_run_posterior(const br_run* run, size_t row, double* mean, double* covariance);
/* Selected prior values (one, or two for the blockwise search). */
BR_API br_status br_run_prior(const br_run* run, double* values, size_t capacity, size_t* count);

/* ---- numerical building blocks ---- */

/* Fits the kernel hyperparameters to (t_obs, y) and returns the smoothed
 * states and derivatives on t_est. hyper receives (sigma^2, ell, chi); any
 * output pointer may be NULL. */
BR_API br_status br_gp_fit(const double* t_obs, const double* y, size_t m, const double* t_est,
                           size_t m_est, double tau, double* y_tilde, double* z_tilde,
                           double* hyper);

/* Posterior of one operator row. data_matrix is m x d and w_sqrt m x m, both
 * row-major; gamma has d entries. covariance receives d * d values. */
BR_API br_status br_op_post(const double* data_matrix, size_t m, size_t d, const double* z,
                            const double* w_sqrt, const double* gamma, double* mean,
                            double* covariance);

#ifdef __cplusplus
}
#endif

#endif /* BAYESROM_H */
