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

// Experiment configuration.  The file format is TOML; docs/config.md lists
// every key with its default.  A run manifest (JSON) is also accepted and
// reproduces the run it came from.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bayesmetro/costs.hpp"
#include "bayesmetro/priors.hpp"
#include "bayesmetro/testers.hpp"

namespace bm {

inline constexpr int kConfigSchemaVersion = 1;

struct NoiseConfig {
  std::string kind = "amplitude_damping";
  double p = 0.0;
};

struct ChannelConfig {
  /// su2 | phase | thermometry
  std::string kind = "su2";
  double time = 1.0;
  double energy = 1.0;
  double spectral_density = 1.0;
  std::optional<NoiseConfig> noise;
};

struct PriorConfig {
  /// haar_su2 | uniform | sine_exp
  std::string kind = "haar_su2";
  int points = 2000;
  SamplingMode sampling = SamplingMode::Grid;
  double lo = 0.0;
  double hi = 1.0;
  double alpha = 0.0;
};

struct SeesawSection {
  double epsilon = 1e-6;
  int max_iters = 50;
  int restarts = 5;
  /// 0 selects the default for the channel (27, or 20 for thermometry).
  int outcomes = 0;
  /// Start each class from the estimators found for the smaller classes
  /// already solved (parallel, then sequential, then general).
  bool nested_warm_start = true;
};

struct SolverSection {
  double tolerance = 1e-8;
  int max_iterations = 100;
  sdp::Backend backend = sdp::Backend::Complex;
};

struct GreedySection {
  int trajectories = 10000;
  int rounds = 2;
  int batch = 1;
  StrategyKind inner = StrategyKind::Parallel;
  bool adaptive = true;
  bool non_adaptive = true;
  /// Seesaw settings for the per-posterior solves; 0 = inherit.
  int outcomes = 0;
  int restarts = 2;
  int max_iters = 20;
  ResampleSettings resample;
};

struct SweepSection {
  std::string parameter;
  std::vector<double> values;
  bool include_greedy = false;
};

struct AnalysisSection {
  bool van_trees = false;
  bool beta_scan = false;
  bool su2_analytic = false;
};

struct OutputSection {
  std::string root = "runs";
  bool trace_csv = true;
  bool realizations = true;
  bool dump_sdp = false;
  bool hypotheses_csv = false;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "experiment";
  std::uint64_t seed = 1;
  int workers = 1;
  ChannelConfig channel;
  PriorConfig prior;
  /// Empty selects the channel's natural cost.
  std::string cost;
  std::vector<StrategyKind> classes{StrategyKind::Parallel};
  int copies = 1;
  SeesawSection seesaw;
  SolverSection solver;
  GreedySection greedy;
  std::optional<SweepSection> sweep;
  AnalysisSection analysis;
  OutputSection output;
};

/// Versions of the TOML and JSON parsers, for run manifests.
std::string toml_library_version();
std::string json_library_version();

/// Parses TOML text.  Throws Error(Config) with a field-level message.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source = "<config>");

/// TOML file, or a run manifest (.json) whose "config" member is used.
ExperimentConfig load_config(const std::string& path);

/// Range and consistency checks; throws Error(Config).
void validate(const ExperimentConfig& cfg);

/// Effective configuration (all defaults filled in) as JSON text.
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& json);

/// Sets a numeric parameter by dotted name for sweeps.  Accepted names:
/// channel.noise.p (p), channel.time (t), prior.alpha (alpha), prior.points,
/// seesaw.outcomes, strategy.copies (k; also sets greedy.rounds).
void set_parameter(ExperimentConfig& cfg, const std::string& name, double value);

// Derived objects.
ChannelModel make_channel(const ExperimentConfig& cfg);
HypothesisSet make_prior(const ExperimentConfig& cfg);
CostKernel make_cost(const ExperimentConfig& cfg);
int effective_outcomes(const ExperimentConfig& cfg);
int effective_greedy_outcomes(const ExperimentConfig& cfg);

}  // namespace bm
