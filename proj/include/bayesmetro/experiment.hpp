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

// Experiment drivers behind the command line: optimize, greedy and sweep,
// with run directories, manifests and reports (docs/report.md).

#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bayesmetro/analysis.hpp"
#include "bayesmetro/config.hpp"
#include "bayesmetro/greedy.hpp"
#include "bayesmetro/seesaw.hpp"

namespace bm {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct ClassResult {
  StrategyKind kind = StrategyKind::Parallel;
  int copies = 1;
  bool ok = false;
  std::string error;
  double seconds = 0.0;
  SeesawResult seesaw;
  /// Largest single-iteration decrease (increase for minimization) over all
  /// restart traces.
  double worst_regression = 0.0;
  std::optional<double> analytic;
  /// Realization round-trip error on sample hypotheses (NaN if not built).
  double realization_error = std::numeric_limits<double>::quiet_NaN();
};

struct OptimizeOutcome {
  std::vector<ClassResult> classes;
  AnalysisReport analysis;
  bool solver_failed = false;
};

/// Seesaw for every configured class.  With `dir`, writes report.json,
/// traces, realizations, analysis.json and optional SDP dumps there.
/// Solver failures are recorded per class and do not throw.
OptimizeOutcome optimize(const ExperimentConfig& cfg,
                         const std::filesystem::path* dir = nullptr);

struct GreedyMode {
  std::string mode;  // "greedy" or "non_adaptive"
  GreedyReport report;
  double seconds = 0.0;
};

struct GreedyOutcome {
  std::vector<GreedyMode> modes;
  /// Per round: mean and standard error of (greedy - non_adaptive) over
  /// trajectories completed in both modes (shared random streams).
  std::vector<double> paired_mean;
  std::vector<double> paired_stderr;
};

GreedyOutcome greedy(const ExperimentConfig& cfg,
                     const std::filesystem::path* dir = nullptr);

struct SweepRow {
  double value = 0.0;
  std::string cls;
  double score = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = 0.0;
  std::string error;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  int failures = 0;
};

/// One optimize (and greedy, if configured) run per sweep value; failures
/// are recorded and the sweep continues.
SweepOutcome sweep(const ExperimentConfig& cfg,
                   const std::filesystem::path* dir = nullptr);

enum class Command { Optimize, Greedy, Sweep };
const char* to_string(Command c);

struct RunResult {
  std::filesystem::path dir;
  /// 0 success, 2 configuration error, 3 solver failure, 1 other errors.
  int exit_code = 0;
  std::string error;
  /// Short JSON summary (scores per class / mode / sweep point).
  std::string summary;
};

/// Creates root/<name>-<command>-<UTC timestamp> and points root/latest at
/// it.
std::filesystem::path create_run_directory(const std::filesystem::path& root,
                                           const std::string& name,
                                           const std::string& command);

/// Full run: directory, manifest, driver, final manifest.  Never throws for
/// run-time failures; they are reported through exit_code.
RunResult run_command(Command command, const ExperimentConfig& cfg,
                      const std::string& config_source,
                      const std::string& config_text);

}  // namespace bm
