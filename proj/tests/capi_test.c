// Copyright 2026 The bayesmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* Exercises the shared library through its C interface only. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "bayesmetro/bayesmetro.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static const char* kTiny =
    "name = \"capi\"\n"
    "seed = 2\n"
    "cost = \"fidelity_su2\"\n"
    "[prior]\nkind = \"haar_su2\"\npoints = 1500\n"
    "[strategy]\nclasses = [\"parallel\"]\ncopies = 1\n"
    "[seesaw]\nrestarts = 1\nmax_iters = 10\noutcomes = 8\n";

int main(int argc, char** argv) {
  const char* root = argc > 1 ? argv[1] : "capi_runs";

  EXPECT(strcmp(bm_version(), "0.1.0") == 0);
  EXPECT(bm_exit_code(BM_OK) == 0);
  EXPECT(bm_exit_code(BM_ERR_CONFIG) == 2);
  EXPECT(bm_exit_code(BM_ERR_SOLVER) == 3);
  EXPECT(bm_exit_code(BM_ERR_IO) == 1);
  EXPECT(fabs(bm_analytic_su2_score(1) - 0.5) < 1e-15);
  EXPECT(isnan(bm_analytic_su2_score(0)));

  /* Null handles are rejected, not dereferenced. */
  bm_config* cfg = NULL;
  EXPECT(bm_config_parse(NULL, NULL, &cfg) == BM_ERR_INVALID_ARGUMENT);
  EXPECT(bm_config_validate(NULL) == BM_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(bm_last_error()) > 0);

  /* Schema violations. */
  EXPECT(bm_config_parse("[channel]\nbogus = 1\n", "bad", &cfg) == BM_ERR_CONFIG);
  EXPECT(cfg == NULL);
  EXPECT(strstr(bm_last_error(), "channel.bogus") != NULL);
  EXPECT(bm_config_load("/nonexistent/config.toml", &cfg) == BM_ERR_IO);

  EXPECT(bm_config_parse(kTiny, "tiny", &cfg) == BM_OK);
  EXPECT(cfg != NULL);
  EXPECT(bm_config_validate(cfg) == BM_OK);
  EXPECT(bm_config_set_workers(cfg, 0) == BM_ERR_CONFIG);
  EXPECT(bm_config_set_tolerance(cfg, -1.0) == BM_ERR_CONFIG);
  EXPECT(bm_config_set_seed(cfg, 9) == BM_OK);
  EXPECT(bm_config_set_output_root(cfg, root) == BM_OK);

  char* json = NULL;
  EXPECT(bm_config_to_json(cfg, &json) == BM_OK);
  EXPECT(json != NULL && strstr(json, "\"seed\": 9") != NULL);
  bm_string_free(json);

  double scores[4];
  size_t count = 0;
  EXPECT(bm_optimize_scores(cfg, scores, 4, &count) == BM_OK);
  EXPECT(count == 1);
  printf("k=1 parallel score %.6f\n", scores[0]);
  EXPECT(fabs(scores[0] - 0.5) < 2e-2);
  EXPECT(bm_optimize_scores(cfg, scores, 0, &count) == BM_ERR_INVALID_ARGUMENT);

  bm_run* run = NULL;
  EXPECT(bm_run_command(BM_CMD_OPTIMIZE, cfg, &run) == BM_OK);
  EXPECT(run != NULL);
  if (run) {
    EXPECT(bm_run_exit_code(run) == 0);
    EXPECT(strlen(bm_run_directory(run)) > 0);
    EXPECT(strstr(bm_run_summary(run), "parallel") != NULL);
    EXPECT(strlen(bm_run_error(run)) == 0);
    bm_run_free(run);
  }

  const double values[2] = {0.0, 1.0};
  EXPECT(bm_config_set_sweep(cfg, "p", values, 0) == BM_ERR_CONFIG);
  EXPECT(bm_config_set_sweep(cfg, "p", values, 2) == BM_OK);

  const char* inputs[1] = {"/nonexistent/sweep.csv"};
  EXPECT(bm_plot(inputs, 1, "out.svg", NULL, NULL, NULL) == BM_ERR_IO);

  bm_config_free(cfg);
  bm_config_free(NULL);
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
