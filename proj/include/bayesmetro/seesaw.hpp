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

// Alternating tester / estimator optimization with restarts.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bayesmetro/costs.hpp"
#include "bayesmetro/priors.hpp"
#include "bayesmetro/testers.hpp"

namespace bm {

struct SeesawConfig {
  double epsilon = 1e-6;
  int max_iters = 50;
  int restarts = 5;
  std::uint64_t seed = 1;
  int outcomes = 27;
  int workers = 1;
  SolveSettings solver;
  /// Extra starting estimator sets, tried before the random restarts.
  std::vector<EstimatorSet> warm_starts;
};

struct SeesawProblem {
  StrategyClass strategy;
  /// Must carry a channel cache for strategy.copies copies.
  const HypothesisSet* prior = nullptr;
  CostKernel kernel;
};

struct RestartRecord {
  bool warm = false;
  double score = 0.0;
  bool converged = false;
  std::vector<double> trace;
  /// Largest step against the optimization sense that a tester or
  /// estimator update would have taken; such updates are rejected.
  double rejected_step = 0.0;
  int rejected = 0;
};

struct SeesawResult {
  double score = 0.0;
  TesterSet testers;
  EstimatorSet estimators;
  std::vector<double> trace;
  int restart = 0;
  bool converged = false;
  SdpDiagnostics diagnostics;
  std::vector<RestartRecord> restarts;
  int sdp_solves = 0;
};

/// N_O estimators drawn from the prior (seeded).
EstimatorSet sample_estimators(const HypothesisSet& h, int n, std::uint64_t seed);

/// Score of a tester/estimator pair on the cached prior.
double seesaw_score(const SeesawProblem& problem, const TesterSet& testers,
                    const EstimatorSet& estimators);

SeesawResult run_seesaw(const SeesawProblem& problem, const SeesawConfig& cfg);

/// Largest single-iteration step against the optimization sense over all
/// restart traces (0 for a monotone run).
double worst_regression(const SeesawResult& r, bool maximize);

/// Largest rejected step over all restarts.
double worst_rejected_step(const SeesawResult& r);

/// Columns: restart, warm, iteration, score.
void write_trace_csv(std::ostream& os, const SeesawResult& result);

}  // namespace bm
