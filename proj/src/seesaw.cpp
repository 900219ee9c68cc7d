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

#include "bayesmetro/seesaw.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "bayesmetro/parallel.hpp"
#include "bayesmetro/rng.hpp"

namespace bm {

EstimatorSet sample_estimators(const HypothesisSet& h, int n,
                               std::uint64_t seed) {
  if (n < 1) fail("need at least one estimator");
  Rng rng(seed);
  const RVector& w = h.weights();
  EstimatorSet out;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    double cum = 0.0;
    Index j = 0;
    for (; j + 1 < w.size(); ++j) {
      cum += w(j);
      if (u < cum) break;
    }
    out.estimates.push_back(h.point(static_cast<std::size_t>(j)));
  }
  return out;
}

double seesaw_score(const SeesawProblem& problem, const TesterSet& testers,
                    const EstimatorSet& estimators) {
  const RMatrix p = problem.prior->probabilities(testers);
  return score(problem.kernel, *problem.prior, p, estimators);
}

namespace {

struct RestartOutcome {
  RestartRecord record;
  TesterSet testers;
  EstimatorSet estimators;
  SdpDiagnostics diagnostics;
  int solves = 0;
};

RestartOutcome run_one(const SeesawProblem& problem, const SeesawConfig& cfg,
                       EstimatorSet est, int restart) {
  const HypothesisSet& h = *problem.prior;
  const ChoiCache& cache = h.cache();
  const CostKernel& kernel = problem.kernel;
  const Index dim = cache.layout.total_dim();
  const Index d_in = cache.channel->d_in();
  const Index d_out = cache.channel->d_out();

  RestartOutcome out;
  std::optional<TesterSet> testers;
  double current = 0.0;
  auto reject = [&](double kept, double proposed) {
    ++out.record.rejected;
    out.record.rejected_step =
        std::max(out.record.rejected_step, std::abs(kept - proposed));
  };
  for (int it = 0; it < cfg.max_iters; ++it) {
    // Step 1: testers for fixed estimators.
    const RMatrix table = cost_table(kernel, h.points(), est);
    const std::vector<CMatrix> obj =
        build_objective(cache.powers, h.weights(), table, dim);
    TesterSolution sol;
    try {
      sol = solve_testers(problem.strategy, d_in, d_out, obj, kernel.sense(),
                          cfg.solver);
    } catch (const Error& e) {
      throw Error(e.kind(), "seesaw restart " + std::to_string(restart) +
                                " iteration " + std::to_string(it + 1) + ": " +
                                e.what());
    }
    ++out.solves;
    out.diagnostics = sol.diagnostics;
    double s1 = seesaw_score(problem, sol.testers, est);
    if (testers) {
      // Keep the previous testers if the new solve is numerically worse.
      const double prev = seesaw_score(problem, *testers, est);
      if (kernel.better_or_equal(s1, prev)) {
        testers = sol.testers;
      } else {
        reject(prev, s1);
        s1 = prev;
      }
    } else {
      testers = sol.testers;
    }

    // Step 2: estimators for fixed testers.
    const RMatrix p = h.probabilities(*testers);
    EstimatorSet next = update_all_estimators(kernel, h, p, &est);
    double s2 = score(kernel, h, p, next);
    if (kernel.better_or_equal(s2, s1)) {
      est = std::move(next);
    } else {
      reject(s1, s2);
      s2 = s1;
    }

    const bool done =
        !out.record.trace.empty() && std::abs(s2 - current) < cfg.epsilon;
    out.record.trace.push_back(s2);
    current = s2;
    if (done) {
      out.record.converged = true;
      break;
    }
  }
  out.record.score = current;
  out.testers = std::move(*testers);
  out.estimators = std::move(est);
  return out;
}

}  // namespace

SeesawResult run_seesaw(const SeesawProblem& problem, const SeesawConfig& cfg) {
  if (!problem.prior) fail("seesaw problem has no prior");
  if (!(cfg.epsilon > 0.0)) fail("seesaw epsilon must be positive");
  if (cfg.max_iters < 1) fail("seesaw max_iters must be >= 1");
  if (cfg.restarts < 0) fail("seesaw restarts must be >= 0");
  if (cfg.outcomes < 1) fail("seesaw needs at least one outcome");
  const HypothesisSet& h = *problem.prior;
  if (h.cache().copies != problem.strategy.copies) {
    fail("hypothesis cache holds " + std::to_string(h.cache().copies) +
         " copies but the strategy uses " +
         std::to_string(problem.strategy.copies));
  }

  std::vector<EstimatorSet> starts;
  std::vector<bool> warm;
  for (const auto& w : cfg.warm_starts) {
    if (static_cast<int>(w.size()) != cfg.outcomes) {
      fail("warm-start estimator count differs from the outcome count");
    }
    starts.push_back(w);
    warm.push_back(true);
  }
  const int n_random =
      std::max(cfg.restarts, starts.empty() ? 1 : 0);
  for (int r = 0; r < n_random; ++r) {
    starts.push_back(sample_estimators(
        h, cfg.outcomes, derive_seed(cfg.seed, static_cast<std::uint64_t>(r))));
    warm.push_back(false);
  }

  std::vector<RestartOutcome> results(starts.size());
  parallel_for(starts.size(), cfg.workers, [&](std::size_t r) {
    results[r] = run_one(problem, cfg, starts[r], static_cast<int>(r));
    results[r].record.warm = warm[r];
  });

  SeesawResult out;
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    const double a = results[r].record.score;
    const double b = results[best].record.score;
    if (problem.kernel.maximize() ? a > b : a < b) best = r;
  }
  for (auto& r : results) {
    out.restarts.push_back(r.record);
    out.sdp_solves += r.solves;
  }
  RestartOutcome& b = results[best];
  out.score = b.record.score;
  out.testers = std::move(b.testers);
  out.estimators = std::move(b.estimators);
  out.trace = b.record.trace;
  out.restart = static_cast<int>(best);
  out.converged = b.record.converged;
  out.diagnostics = b.diagnostics;
  return out;
}

void write_trace_csv(std::ostream& os, const SeesawResult& result) {
  os.precision(17);
  os << "restart,warm,iteration,score\n";
  for (std::size_t r = 0; r < result.restarts.size(); ++r) {
    const auto& rec = result.restarts[r];
    for (std::size_t i = 0; i < rec.trace.size(); ++i) {
      os << r << "," << (rec.warm ? 1 : 0) << "," << i + 1 << ","
         << rec.trace[i] << "\n";
    }
  }
}

double worst_regression(const SeesawResult& r, bool maximize) {
  double worst = 0.0;
  for (const auto& rec : r.restarts) {
    for (std::size_t i = 1; i < rec.trace.size(); ++i) {
      const double d = maximize ? rec.trace[i - 1] - rec.trace[i]
                                : rec.trace[i] - rec.trace[i - 1];
      worst = std::max(worst, d);
    }
  }
  return worst;
}

double worst_rejected_step(const SeesawResult& r) {
  double worst = 0.0;
  for (const auto& rec : r.restarts) worst = std::max(worst, rec.rejected_step);
  return worst;
}

}  // namespace bm
