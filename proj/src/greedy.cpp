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

#include "bayesmetro/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <limits>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include "bayesmetro/parallel.hpp"

namespace bm {

int draw_outcome(const RVector& probabilities, double u) {
  const Index n = probabilities.size();
  if (n == 0) fail("cannot draw from an empty distribution");
  RVector p = probabilities;
  for (Index i = 0; i < n; ++i) {
    if (p(i) < 0.0) {
      if (p(i) < -1e-9) {
        fail("outcome probability " + std::to_string(p(i)) + " is negative");
      }
      p(i) = 0.0;
    }
  }
  const double total = p.sum();
  if (std::abs(total - 1.0) > 1e-6) {
    fail("outcome probabilities sum to " + std::to_string(total));
  }
  const double target = u * total;
  double cum = 0.0;
  Index last = 0;
  for (Index i = 0; i < n; ++i) {
    if (p(i) <= 0.0) continue;
    last = i;
    cum += p(i);
    if (target < cum) return static_cast<int>(i);
  }
  return static_cast<int>(last);
}

int simulate_outcome(const TesterSet& testers, std::size_t j_true,
                     const ChoiCache& cache, Rng& rng) {
  if (j_true >= static_cast<std::size_t>(cache.powers.cols())) {
    fail("true hypothesis index out of range");
  }
  if (testers.layout().total_dim() != cache.layout.total_dim()) {
    fail("tester dimension does not match the cached channel powers");
  }
  const CVector col = cache.powers.col(static_cast<Index>(j_true));
  const RVector p = (testers.vectorized().adjoint() * col).real();
  return draw_outcome(p, uniform01(rng));
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv(std::uint64_t& h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffU;
    h *= kFnvPrime;
  }
}

std::uint64_t bits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

}  // namespace

std::uint64_t posterior_cache_key(const HypothesisSet& h) {
  std::uint64_t key = kFnvOffset;
  fnv(key, h.size());
  for (Index j = 0; j < h.weights().size(); ++j) {
    fnv(key, static_cast<std::uint64_t>(std::llround(h.weights()(j) * 1e12)));
  }
  for (const auto& p : h.points()) {
    for (Index c = 0; c < p.size(); ++c) fnv(key, bits(p(c)));
  }
  return key;
}

struct StrategyMemo::Impl {
  std::mutex mutex;
  std::unordered_map<std::uint64_t,
                     std::shared_future<std::shared_ptr<const GreedyStep>>>
      entries;
  int misses = 0;
  int hits = 0;
  double worst = 0.0;
  double rejected = 0.0;
  int rejected_updates = 0;
  int sdp_solves = 0;
};

StrategyMemo::StrategyMemo() : impl_(std::make_unique<Impl>()) {}
StrategyMemo::~StrategyMemo() = default;

int StrategyMemo::misses() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->misses;
}

double StrategyMemo::worst_rejected_step() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->rejected;
}

int StrategyMemo::rejected_updates() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->rejected_updates;
}

int StrategyMemo::sdp_solves() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->sdp_solves;
}

double StrategyMemo::worst_regression() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->worst;
}

int StrategyMemo::hits() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->hits;
}

std::shared_ptr<const GreedyStep> StrategyMemo::get(
    const HypothesisSet& h, const SeesawProblem& problem,
    const SeesawConfig& cfg) {
  const std::uint64_t key = posterior_cache_key(h);
  std::promise<std::shared_ptr<const GreedyStep>> promise;
  std::unique_lock lock(impl_->mutex);
  auto it = impl_->entries.find(key);
  if (it != impl_->entries.end()) {
    ++impl_->hits;
    auto fut = it->second;
    lock.unlock();
    return fut.get();
  }
  ++impl_->misses;
  impl_->entries.emplace(key, promise.get_future().share());
  lock.unlock();
  try {
    SeesawProblem local = problem;
    local.prior = &h;
    SeesawConfig c = cfg;
    c.seed = derive_seed(cfg.seed, key);
    SeesawResult r = run_seesaw(local, c);
    auto step = std::make_shared<GreedyStep>();
    step->probabilities = h.probabilities(r.testers);
    step->testers = std::move(r.testers);
    step->estimators = std::move(r.estimators);
    step->score = r.score;
    step->sdp_solves = r.sdp_solves;
    step->worst_regression = bm::worst_regression(r, problem.kernel.maximize());
    step->rejected_step = bm::worst_rejected_step(r);
    for (const auto& rec : r.restarts) step->rejected_updates += rec.rejected;
    {
      std::lock_guard relock(impl_->mutex);
      impl_->worst = std::max(impl_->worst, step->worst_regression);
      impl_->rejected = std::max(impl_->rejected, step->rejected_step);
      impl_->rejected_updates += step->rejected_updates;
      impl_->sdp_solves += step->sdp_solves;
    }
    std::shared_ptr<const GreedyStep> out = step;
    promise.set_value(out);
    return out;
  } catch (...) {
    promise.set_exception(std::current_exception());
    throw;
  }
}

namespace {

struct Trajectory {
  std::vector<double> scores;
  std::vector<double> expected;
  bool aborted = false;
};

Index sample_index(const RVector& w, double u) {
  double cum = 0.0;
  for (Index j = 0; j + 1 < w.size(); ++j) {
    cum += w(j);
    if (u < cum) return j;
  }
  return w.size() - 1;
}

}  // namespace

GreedyReport run_greedy(const GreedyProblem& problem, const GreedyConfig& cfg) {
  if (!problem.prior) fail("greedy problem has no prior");
  if (cfg.trajectories < 1) fail("greedy needs at least one trajectory");
  if (cfg.rounds < 1) fail("greedy needs at least one round");
  if (cfg.batch < 1) fail("greedy batch size must be >= 1");
  const HypothesisSet& prior = *problem.prior;
  if (!prior.has_cache() || prior.cache().copies != cfg.batch) {
    fail("greedy prior must carry a channel cache for " +
         std::to_string(cfg.batch) + " copies");
  }

  SeesawProblem sp;
  sp.strategy = StrategyClass{cfg.inner, cfg.batch};
  sp.kernel = problem.kernel;
  SeesawConfig scfg = cfg.seesaw;
  // Parallelism is spent on trajectories.
  scfg.workers = 1;

  StrategyMemo memo;
  const auto n = static_cast<std::size_t>(cfg.trajectories);
  std::vector<Trajectory> traj(n);

  parallel_for(n, cfg.workers, [&](std::size_t l) {
    Rng rng(derive_seed(cfg.seed, l));
    Trajectory& out = traj[l];
    const Index j_true = sample_index(prior.weights(), uniform01(rng));
    const RVector& theta = prior.point(static_cast<std::size_t>(j_true));
    const std::span<const double> th(theta.data(), theta.size());

    HypothesisSet h = prior;
    std::shared_ptr<const GreedyStep> fixed;
    Index jt = j_true;
    for (int c = 0; c < cfg.rounds; ++c) {
      std::shared_ptr<const GreedyStep> step;
      const RMatrix* probs = nullptr;
      RMatrix local_probs;
      if (cfg.adaptive || c == 0) {
        step = memo.get(h, sp, scfg);
        if (c == 0) fixed = step;
        probs = &step->probabilities;
      } else if (&h.cache() == &prior.cache()) {
        probs = &fixed->probabilities;
      } else {
        local_probs = h.probabilities(fixed->testers);
        probs = &local_probs;
      }
      const RVector column = probs->col(jt);
      const int s = draw_outcome(column, uniform01(rng));

      RVector post;
      try {
        post = posterior_weights(h.weights(), *probs, s);
      } catch (const Error&) {
        out.aborted = true;
        return;
      }
      RVector est;
      if (cfg.adaptive || c == 0) {
        est = step->estimators.estimates[static_cast<std::size_t>(s)];
      } else {
        est = optimal_estimate(problem.kernel, post, h.points());
      }
      const std::span<const double> es(est.data(), est.size());
      out.scores.push_back(evaluate_cost(problem.kernel, th, es));
      double expected = 0.0;
      for (Index j = 0; j < post.size(); ++j) {
        if (post(j) == 0.0) continue;
        const RVector& pj = h.point(static_cast<std::size_t>(j));
        expected += post(j) * evaluate_cost(problem.kernel,
                                            std::span<const double>(pj.data(), pj.size()), es);
      }
      out.expected.push_back(expected);

      if (c + 1 == cfg.rounds) break;
      h = h.with_weights(std::move(post));
      if (cfg.resample.enabled &&
          h.effective_sample_size() <
              cfg.resample.ess_threshold * static_cast<double>(h.size())) {
        // Resample without the cache, then append the true parameter with
        // zero weight so its likelihood column stays available.
        const HypothesisSet bare(h.points(), h.weights(), h.mode(), h.domain());
        const HypothesisSet r = resample(
            bare, cfg.resample.ess_threshold,
            derive_seed(derive_seed(cfg.seed, l), static_cast<std::uint64_t>(c)),
            cfg.resample.jitter);
        std::vector<RVector> pts = r.points();
        pts.push_back(theta);
        RVector w = RVector::Zero(static_cast<Index>(pts.size()));
        w.head(static_cast<Index>(r.size())) = r.weights();
        h = HypothesisSet(std::move(pts), std::move(w), r.mode(), r.domain())
                .with_cache(*prior.cache().channel, cfg.batch);
        jt = static_cast<Index>(h.size()) - 1;
      }
    }
  });

  GreedyReport rep;
  rep.config = cfg;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.scores = RMatrix::Constant(cfg.trajectories, cfg.rounds, nan);
  rep.expected = RMatrix::Constant(cfg.trajectories, cfg.rounds, nan);
  for (std::size_t l = 0; l < n; ++l) {
    if (traj[l].aborted) {
      ++rep.aborted;
      continue;
    }
    ++rep.trajectories;
    for (int c = 0; c < cfg.rounds; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      rep.scores(static_cast<Index>(l), c) = traj[l].scores[cc];
      rep.expected(static_cast<Index>(l), c) = traj[l].expected[cc];
    }
  }
  if (rep.trajectories == 0) fail("every greedy trajectory was aborted");
  const double nt = rep.trajectories;
  // Two-pass mean and standard error over the completed rows.
  auto summarize = [&](const RMatrix& m, std::vector<double>& mean_out,
                       std::vector<double>& se_out) {
    for (int c = 0; c < cfg.rounds; ++c) {
      double sum = 0.0, sum2 = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        if (!traj[l].aborted) sum += m(static_cast<Index>(l), c);
      }
      const double mean = sum / nt;
      for (std::size_t l = 0; l < n; ++l) {
        if (traj[l].aborted) continue;
        const double d = m(static_cast<Index>(l), c) - mean;
        sum2 += d * d;
      }
      const double var = nt > 1 ? sum2 / (nt - 1) : 0.0;
      mean_out.push_back(mean);
      se_out.push_back(std::sqrt(var / nt));
    }
  };
  summarize(rep.scores, rep.mean, rep.stderr_);
  summarize(rep.expected, rep.expected_mean, rep.expected_stderr);
  rep.seesaw_runs = memo.misses();
  rep.cache_hits = memo.hits();
  rep.worst_regression = memo.worst_regression();
  rep.rejected_step = memo.worst_rejected_step();
  rep.rejected_updates = memo.rejected_updates();
  rep.sdp_solves = memo.sdp_solves();
  return rep;
}

void write_rounds_csv(std::ostream& os, const GreedyReport& report) {
  os.precision(17);
  os << "round,mean,stderr,expected,expected_stderr\n";
  for (std::size_t c = 0; c < report.mean.size(); ++c) {
    os << c + 1 << "," << report.mean[c] << "," << report.stderr_[c] << ","
       << report.expected_mean[c] << "," << report.expected_stderr[c] << "\n";
  }
}

}  // namespace bm
