/* Copyright 2026 The bayesmetro Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libbayesmetro.  Handles are opaque; every fallible call
 * returns a bm_status and leaves a message for bm_last_error() on the
 * calling thread. */

#ifndef BAYESMETRO_H_
#define BAYESMETRO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BM_API __declspec(dllexport)
#else
#define BM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bm_status {
  BM_OK = 0,
  BM_ERR_INVALID_ARGUMENT = 1,
  BM_ERR_CONFIG = 2,
  BM_ERR_SOLVER = 3,
  BM_ERR_IO = 4,
  BM_ERR_INTERNAL = 5
} bm_status;

typedef enum bm_command {
  BM_CMD_OPTIMIZE = 0,
  BM_CMD_GREEDY = 1,
  BM_CMD_SWEEP = 2
} bm_command;

typedef struct bm_config bm_config;
typedef struct bm_run bm_run;

BM_API const char* bm_version(void);

/* Message of the last failed call on this thread ("" if none). */
BM_API const char* bm_last_error(void);

/* Process exit code for a status: 0 ok, 2 config, 3 solver, 1 otherwise. */
BM_API int bm_exit_code(bm_status status);

/* Loads a TOML config, or the "config" member of a JSON run manifest. */
BM_API bm_status bm_config_load(const char* path, bm_config** out);
BM_API bm_status bm_config_parse(const char* text, const char* source,
                                 bm_config** out);
BM_API void bm_config_free(bm_config* cfg);

BM_API bm_status bm_config_validate(const bm_config* cfg);
BM_API bm_status bm_config_set_seed(bm_config* cfg, uint64_t seed);
BM_API bm_status bm_config_set_workers(bm_config* cfg, int workers);
BM_API bm_status bm_config_set_tolerance(bm_config* cfg, double tolerance);
BM_API bm_status bm_config_set_output_root(bm_config* cfg, const char* root);
/* Replaces the sweep table (include_greedy is kept if one existed). */
BM_API bm_status bm_config_set_sweep(bm_config* cfg, const char* parameter,
                                     const double* values, size_t count);

/* Effective configuration with all defaults filled in.  Free the string
 * with bm_string_free. */
BM_API bm_status bm_config_to_json(const bm_config* cfg, char** out);
BM_API void bm_string_free(char* s);

/* Runs a command into a fresh timestamped directory below the output root.
 * *out is set whenever a run directory was created, also on failure, so
 * partial outputs can be located.  The status reflects the run outcome. */
BM_API bm_status bm_run_command(bm_command command, const bm_config* cfg,
                                bm_run** out);
BM_API const char* bm_run_directory(const bm_run* run);
/* Short JSON summary of the run. */
BM_API const char* bm_run_summary(const bm_run* run);
BM_API const char* bm_run_error(const bm_run* run);
BM_API int bm_run_exit_code(const bm_run* run);
BM_API void bm_run_free(bm_run* run);

/* Optimizes every configured class without writing files.  Scores land in
 * the class order of the config; *count is the number of classes.  NaN
 * marks a class that failed in the solver (status BM_ERR_SOLVER). */
BM_API bm_status bm_optimize_scores(const bm_config* cfg, double* scores,
                                    size_t capacity, size_t* count);

/* SVG chart from sweep / greedy CSV files.  Labels may be NULL. */
BM_API bm_status bm_plot(const char* const* inputs, size_t count,
                         const char* out, const char* title,
                         const char* x_label, const char* y_label);

/* cos^2(pi / (k + 3)); NaN for k < 1. */
BM_API double bm_analytic_su2_score(int k);

#ifdef __cplusplus
}
#endif

#endif /* BAYESMETRO_H_ */
