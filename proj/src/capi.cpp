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

#include "bayesmetro/bayesmetro.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "bayesmetro/analysis.hpp"
#include "bayesmetro/config.hpp"
#include "bayesmetro/experiment.hpp"
#include "bayesmetro/plot.hpp"

struct bm_config {
  bm::ExperimentConfig cfg;
  std::string source;
  std::string text;
};

struct bm_run {
  bm::RunResult result;
  std::string dir;
};

namespace {

thread_local std::string g_last_error;

bm_status status_of(bm::ErrorKind k) {
  switch (k) {
    case bm::ErrorKind::InvalidArgument:
      return BM_ERR_INVALID_ARGUMENT;
    case bm::ErrorKind::Config:
      return BM_ERR_CONFIG;
    case bm::ErrorKind::Solver:
      return BM_ERR_SOLVER;
    case bm::ErrorKind::Io:
      return BM_ERR_IO;
    case bm::ErrorKind::Internal:
      return BM_ERR_INTERNAL;
  }
  return BM_ERR_INTERNAL;
}

bm_status fail(bm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
bm_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const bm::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BM_ERR_INTERNAL, e.what());
  }
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bm::Error(bm::ErrorKind::Io, std::string("cannot read '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#define BM_REQUIRE(cond, what) \
  if (!(cond)) return fail(BM_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* bm_version(void) { return bm::kVersion; }

const char* bm_last_error(void) { return g_last_error.c_str(); }

int bm_exit_code(bm_status status) {
  switch (status) {
    case BM_OK:
      return 0;
    case BM_ERR_CONFIG:
      return 2;
    case BM_ERR_SOLVER:
      return 3;
    default:
      return 1;
  }
}

bm_status bm_config_load(const char* path, bm_config** out) {
  BM_REQUIRE(path && out, "bm_config_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<bm_config>();
    c->text = read_file(path);
    c->source = path;
    c->cfg = bm::load_config(path);
    *out = c.release();
    return BM_OK;
  });
}

bm_status bm_config_parse(const char* text, const char* source, bm_config** out) {
  BM_REQUIRE(text && out, "bm_config_parse: null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<bm_config>();
    c->text = text;
    c->source = source ? source : "<config>";
    c->cfg = bm::parse_config(c->text, c->source);
    *out = c.release();
    return BM_OK;
  });
}

void bm_config_free(bm_config* cfg) { delete cfg; }

bm_status bm_config_validate(const bm_config* cfg) {
  BM_REQUIRE(cfg, "bm_config_validate: null config");
  return guarded([&] {
    bm::validate(cfg->cfg);
    return BM_OK;
  });
}

bm_status bm_config_set_seed(bm_config* cfg, uint64_t seed) {
  BM_REQUIRE(cfg, "bm_config_set_seed: null config");
  cfg->cfg.seed = seed;
  return BM_OK;
}

bm_status bm_config_set_workers(bm_config* cfg, int workers) {
  BM_REQUIRE(cfg, "bm_config_set_workers: null config");
  if (workers < 1) return fail(BM_ERR_CONFIG, "workers: must be >= 1");
  cfg->cfg.workers = workers;
  return BM_OK;
}

bm_status bm_config_set_tolerance(bm_config* cfg, double tolerance) {
  BM_REQUIRE(cfg, "bm_config_set_tolerance: null config");
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    return fail(BM_ERR_CONFIG, "solver.tolerance: must lie in (0, 1)");
  }
  cfg->cfg.solver.tolerance = tolerance;
  return BM_OK;
}

bm_status bm_config_set_output_root(bm_config* cfg, const char* root) {
  BM_REQUIRE(cfg && root && *root, "bm_config_set_output_root: empty path");
  cfg->cfg.output.root = root;
  return BM_OK;
}

bm_status bm_config_set_sweep(bm_config* cfg, const char* parameter, const double* values,
                              size_t count) {
  BM_REQUIRE(cfg && parameter, "bm_config_set_sweep: null argument");
  BM_REQUIRE(values || count == 0, "bm_config_set_sweep: null values");
  if (count == 0) return fail(BM_ERR_CONFIG, "sweep.values: must not be empty");
  bm::SweepSection s;
  if (cfg->cfg.sweep) s.include_greedy = cfg->cfg.sweep->include_greedy;
  s.parameter = parameter;
  s.values.assign(values, values + count);
  cfg->cfg.sweep = s;
  return BM_OK;
}

bm_status bm_config_to_json(const bm_config* cfg, char** out) {
  BM_REQUIRE(cfg && out, "bm_config_to_json: null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string s = bm::config_to_json(cfg->cfg);
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) return fail(BM_ERR_INTERNAL, "out of memory");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
    return BM_OK;
  });
}

void bm_string_free(char* s) { std::free(s); }

bm_status bm_run_command(bm_command command, const bm_config* cfg, bm_run** out) {
  BM_REQUIRE(cfg && out, "bm_run_command: null argument");
  *out = nullptr;
  bm::Command cmd;
  switch (command) {
    case BM_CMD_OPTIMIZE:
      cmd = bm::Command::Optimize;
      break;
    case BM_CMD_GREEDY:
      cmd = bm::Command::Greedy;
      break;
    case BM_CMD_SWEEP:
      cmd = bm::Command::Sweep;
      break;
    default:
      return fail(BM_ERR_INVALID_ARGUMENT, "bm_run_command: unknown command");
  }
  return guarded([&] {
    auto r = std::make_unique<bm_run>();
    r->result = bm::run_command(cmd, cfg->cfg, cfg->source, cfg->text);
    r->dir = r->result.dir.string();
    bm_status s = BM_OK;
    switch (r->result.exit_code) {
      case 0:
        break;
      case 2:
        s = BM_ERR_CONFIG;
        break;
      case 3:
        s = BM_ERR_SOLVER;
        break;
      default:
        s = BM_ERR_INTERNAL;
    }
    if (s != BM_OK) g_last_error = r->result.error;
    if (!r->dir.empty()) *out = r.release();
    return s;
  });
}

const char* bm_run_directory(const bm_run* run) { return run ? run->dir.c_str() : ""; }

const char* bm_run_summary(const bm_run* run) {
  return run ? run->result.summary.c_str() : "";
}

const char* bm_run_error(const bm_run* run) { return run ? run->result.error.c_str() : ""; }

int bm_run_exit_code(const bm_run* run) { return run ? run->result.exit_code : 1; }

void bm_run_free(bm_run* run) { delete run; }

bm_status bm_optimize_scores(const bm_config* cfg, double* scores, size_t capacity,
                             size_t* count) {
  BM_REQUIRE(cfg && count, "bm_optimize_scores: null argument");
  BM_REQUIRE(scores || capacity == 0, "bm_optimize_scores: null scores");
  return guarded([&] {
    const auto& classes = cfg->cfg.classes;
    *count = classes.size();
    if (capacity < classes.size()) {
      return fail(BM_ERR_INVALID_ARGUMENT, "bm_optimize_scores: capacity below class count");
    }
    const bm::OptimizeOutcome o = bm::optimize(cfg->cfg);
    for (std::size_t i = 0; i < classes.size(); ++i) {
      scores[i] = std::numeric_limits<double>::quiet_NaN();
      for (const auto& c : o.classes) {
        if (c.kind == classes[i] && c.ok) scores[i] = c.seesaw.score;
      }
    }
    if (o.solver_failed) {
      for (const auto& c : o.classes) {
        if (!c.ok) return fail(BM_ERR_SOLVER, c.error);
      }
    }
    return BM_OK;
  });
}

bm_status bm_plot(const char* const* inputs, size_t count, const char* out, const char* title,
                  const char* x_label, const char* y_label) {
  BM_REQUIRE(out && (inputs || count == 0), "bm_plot: null argument");
  return guarded([&] {
    std::vector<std::string> files;
    for (size_t i = 0; i < count; ++i) {
      if (!inputs[i]) return fail(BM_ERR_INVALID_ARGUMENT, "bm_plot: null input path");
      files.emplace_back(inputs[i]);
    }
    bm::PlotOptions o;
    if (title) o.title = title;
    if (x_label) o.x_label = x_label;
    if (y_label) o.y_label = y_label;
    bm::plot_files(files, out, o);
    return BM_OK;
  });
}

double bm_analytic_su2_score(int k) {
  if (k < 1) return std::numeric_limits<double>::quiet_NaN();
  return bm::analytic_su2_score(k);
}

}  // extern "C"
