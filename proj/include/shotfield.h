/*
 * Copyright 2026 shotfield developers.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the shot-noise field toolkit.  Handles are opaque;
 * every call returns a status code and the last error message per
 * thread is available through sf_last_error().  JSON strings cross the
 * boundary; returned strings are owned by the handle that produced
 * them unless documented as malloc'd.
 */

#ifndef SHOTFIELD_H
#define SHOTFIELD_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_INVALID_ARG = 1,
  SF_ERR_CONFIG = 2,
  SF_ERR_NUMERIC = 3,
  SF_ERR_IO = 4,
  SF_ERR_INTERNAL = 5
} sf_status;

typedef struct sf_experiment sf_experiment;
typedef struct sf_report sf_report;

const char* sf_version(void);

/* Thread-local message describing the most recent failure. */
const char* sf_last_error(void);

/* Experiment lifecycle ---------------------------------------------- */

sf_status sf_experiment_create(const char* config_json, sf_experiment** out);
void sf_experiment_destroy(sf_experiment* experiment);

sf_status sf_experiment_set_seed(sf_experiment* experiment, uint64_t seed);
sf_status sf_experiment_set_threads(sf_experiment* experiment, int threads);
sf_status sf_experiment_set_replicates(sf_experiment* experiment, int replicates);

/* Runs the sweep.  When output_dir is non-NULL, writes report.json,
 * samples.csv, theory.csv and plotdata/ under it. */
sf_status sf_experiment_run(sf_experiment* experiment, const char* output_dir,
                            sf_report** out);

/* Report access ------------------------------------------------------ */

sf_status sf_report_json(const sf_report* report, const char** json_utf8);
sf_status sf_report_passed(const sf_report* report, int* passed);
void sf_report_destroy(sf_report* report);

/* Stateless evaluators ------------------------------------------------
 * Request/response are JSON documents; responses are malloc'd and must
 * be released with sf_string_free. */

/* Limit-law quantities: covariance matrix, stable scale, transforms,
 * characteristic function grids, and the finite-intensity oracle. */
sf_status sf_theory_eval(const char* request_json, char** response_json);

/* Determinant-side diagnostics: operator transform value, trace series,
 * self-convergence, and the higher-order decay table. */
sf_status sf_fredholm_eval(const char* request_json, char** response_json);

/* One point-pattern draw as CSV (columns x[,y]). */
sf_status sf_pattern_sample(const char* request_json, char** csv_out);

void sf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SHOTFIELD_H */
