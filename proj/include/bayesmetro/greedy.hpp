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

// Monte Carlo simulation of adaptive greedy (and non-adaptive) protocols.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "bayesmetro/rng.hpp"
#include "bayesmetro/seesaw.hpp"

namespace bm {

struct GreedyConfig {
  int trajectories = 1000;
  int rounds = 2;
  /// Copies per round (m).
  int batch = 1;
  StrategyKind inner = StrategyKind::Parallel;
  /// false: testers fixed after round 1, only the estimator follows the
  /// posterior.
  bool adaptive = true;
  std::uint64_t seed = 1;
  int workers = 1;
  SeesawConfig seesaw;
  ResampleSettings resample;
};

struct GreedyProblem {
  /// Must carry a channel cache for `batch` copies.
  const HypothesisSet* prior = nullptr;
  CostKernel kernel;
};

struct GreedyReport {
  GreedyConfig config;
  /// Per-round mean score and standard error (sample std / sqrt(N)).
  std::vector<double> mean;
  std::vector<double> stderr_;
  /// Completed trajectories; aborted ones are excluded from the averages.
  int trajectories = 0;
  int aborted = 0;
  /// Distinct posteriors optimized, and lookups answered from the memo.
  int seesaw_runs = 0;
  int cache_hits = 0;
  int sdp_solves = 0;
  /// Worst seesaw regression over the posteriors optimized in this run,
  /// and the largest update the seesaw rejected.
  double worst_regression = 0.0;
  double rejected_step = 0.0;
  int rejected_updates = 0;
  /// Row l, column c: cost recorded by trajectory l in round c (NaN rows
  /// for aborted trajectories).
  RMatrix scores;
  /// Posterior-expected cost of the same estimate, sum_j w_j c(theta_j, est).
  /// Same expectation as `scores`, lower variance.
  RMatrix expected;
  std::vector<double> expected_mean;
  std::vector<double> expected_stderr;
};

/// Categorical draw from one probability column.  Negative entries above
/// -1e-9 are clipped; throws if the total differs from 1 by more than 1e-6.
int draw_outcome(const RVector& probabilities, double u);

/// P(i | theta_true) = Tr(T_i J^{(x)m}) from the cache, then one draw.
int simulate_outcome(const TesterSet& testers, std::size_t j_true,
                     const ChoiCache& cache, Rng& rng);

/// Digest of the weights quantized at 1e-12 (and of the points, which only
/// differ after resampling).
std::uint64_t posterior_cache_key(const HypothesisSet& h);

/// Optimized strategy for one posterior.
struct GreedyStep {
  TesterSet testers;
  EstimatorSet estimators;
  /// N_O x N_H outcome probabilities on the posterior's points.
  RMatrix probabilities;
  double score = 0.0;
  int sdp_solves = 0;
  double worst_regression = 0.0;
  double rejected_step = 0.0;
  int rejected_updates = 0;
};

/// Thread-safe memo of solved posteriors.  Concurrent requests for the same
/// key wait for the first one; entries are never replaced.
class StrategyMemo {
 public:
  StrategyMemo();
  ~StrategyMemo();

  std::shared_ptr<const GreedyStep> get(const HypothesisSet& h,
                                        const SeesawProblem& problem,
                                        const SeesawConfig& cfg);
  int misses() const;
  int hits() const;
  int sdp_solves() const;
  /// Worst seesaw regression over every solved posterior.
  double worst_regression() const;
  double worst_rejected_step() const;
  int rejected_updates() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GreedyReport run_greedy(const GreedyProblem& problem, const GreedyConfig& cfg);

/// Columns: round, mean, stderr, expected, expected_stderr.
void write_rounds_csv(std::ostream& os, const GreedyReport& report);

}  // namespace bm
