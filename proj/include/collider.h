/* Copyright 2026 The Collider Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of the collider shared library: collision-probability estimation,
 * sublinear uniformity testing, collision-entropy estimation, the
 * concentration-bound calculators and the Monte Carlo experiment harness.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Every fallible function returns a clr_status; on failure the thread-
 * local message from clr_last_error() describes what went wrong.
 */

#ifndef COLLIDER_H_
#define COLLIDER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(__cplusplus)
extern "C" {
#endif

typedef enum clr_status {
  CLR_OK = 0,
  CLR_ERR_INVALID_ARGUMENT = 1, /* precondition violated */
  CLR_ERR_DOMAIN = 2,           /* outside the mathematical domain */
  CLR_ERR_UNDEFINED = 3,        /* estimate undefined for observed data */
  CLR_ERR_ENUMERATION = 4,      /* exact enumeration too large */
  CLR_ERR_CALIBRATION = 5,      /* no feasible envelope constants */
  CLR_ERR_BRACKET = 6,          /* root bracketing failed */
  CLR_ERR_IO = 7,               /* file could not be read or written */
  CLR_ERR_INTERNAL = 8          /* unexpected failure */
} clr_status;

typedef struct clr_pmf clr_pmf;
typedef struct clr_histogram clr_histogram;

typedef struct clr_envelope {
  double c_out;
  double c_sq;
  double c_lin;
  double c_heavy;
} clr_envelope;

/* Library metadata and error reporting. */
const char* clr_version(void);
const char* clr_status_name(clr_status status);
/* Message of the most recent failure on this thread; empty string if none. */
const char* clr_last_error(void);

/* ---- Distributions ---------------------------------------------------- */

clr_status clr_pmf_create(const double* weights, size_t m, clr_pmf** out);
clr_status clr_pmf_create_uniform(uint64_t m, clr_pmf** out);
clr_status clr_pmf_create_zipf(uint64_t m, double s, clr_pmf** out);
clr_status clr_pmf_create_planted_bias(uint64_t m, double alpha, clr_pmf** out);
void clr_pmf_free(clr_pmf* pmf);

size_t clr_pmf_size(const clr_pmf* pmf);
/* Copies min(len, m) probabilities into buf. */
clr_status clr_pmf_probs(const clr_pmf* pmf, double* buf, size_t len);
clr_status clr_pmf_collision_probability(const clr_pmf* pmf, double* out);
clr_status clr_pmf_power_sum(const clr_pmf* pmf, unsigned k, double* out);
clr_status clr_pmf_max_prob(const clr_pmf* pmf, double* out);

/* ---- Sampling and histograms ------------------------------------------ */

/* Draws n >= 2 samples from the pmf; identical (master_seed, stream_id)
 * always reproduce the same histogram. */
clr_status clr_sample_histogram(const clr_pmf* pmf, uint64_t n, uint64_t master_seed,
                                uint64_t stream_id, clr_histogram** out);
clr_status clr_histogram_create(const uint64_t* counts, size_t m, clr_histogram** out);
void clr_histogram_free(clr_histogram* hist);

size_t clr_histogram_size(const clr_histogram* hist);
uint64_t clr_histogram_total(const clr_histogram* hist);
clr_status clr_histogram_counts(const clr_histogram* hist, uint64_t* buf, size_t len);

/* ---- Estimation and testing ------------------------------------------- */

clr_status clr_estimate_from_histogram(const clr_histogram* hist, double* q_hat,
                                       uint64_t* collision_pairs);
/* non_uniform is 1 iff q_hat > (1+epsilon)/m (ties count as uniform);
 * epsilon_in_range is 0 when epsilon leaves [1/sqrt(m), 1] (warn only). */
clr_status clr_uniformity_test(const clr_histogram* hist, uint64_t m, double epsilon,
                               int* non_uniform, double* q_hat, double* threshold,
                               int* epsilon_in_range);
/* -log_base(q_hat); CLR_ERR_UNDEFINED when the sample has no collisions. */
clr_status clr_entropy_estimate(const clr_histogram* hist, double base, double* out);

clr_status clr_tester_sample_size(uint64_t m, double epsilon, double delta, double c,
                                  uint64_t* out);
clr_status clr_entropy_sample_size(double q_lower, double epsilon, double delta, double c,
                                   uint64_t* out);

/* Committed calibrated constants for the sample-size formulas. */
double clr_default_tester_c(void);
double clr_default_entropy_c(void);

/* ---- Concentration bounds --------------------------------------------- */

clr_status clr_variance_proxy(const clr_pmf* pmf, uint64_t n, double* out);
clr_status clr_scale_param(const clr_pmf* pmf, uint64_t n, double* out);
clr_status clr_subgamma_tail(double t, double v2, double b, double* out);
/* Pass NULL for env to use the committed default constants. */
clr_status clr_tail_envelope(double epsilon, const clr_pmf* pmf, uint64_t n,
                             const clr_envelope* env, double* out);
clr_envelope clr_default_envelope(void);

/* ---- Moment oracles and bounds ----------------------------------------- */

clr_status clr_lambert_w(double x, double* out);
clr_status clr_symm_diff_moment_exact(uint64_t n, double p, unsigned d, double* out);
clr_status clr_symm_diff_moment_bound(uint64_t n, double p, unsigned d, double c, double* out);
clr_status clr_bin_moment_exact(uint64_t n, double p, unsigned d, double* out);
clr_status clr_bin_moment_bound(uint64_t n, double p, unsigned d, double c1, double c2,
                                double* out);
double clr_default_bin_moment_c1(void);
double clr_default_bin_moment_c2(void);

/* ---- Experiment harness ------------------------------------------------ */

/* Runs the experiment described by the JSON config (see README for the
 * schema) and returns the JSON report.  When the config names an output
 * path, the CSV and JSON summary are also written there.  The returned
 * string must be released with clr_string_free. */
clr_status clr_run_experiment_json(const char* config_json, char** report_json);
void clr_string_free(char* str);

#if defined(__cplusplus)
} /* extern "C" */
#endif

#endif /* COLLIDER_H_ */
