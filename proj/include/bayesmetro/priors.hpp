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

// Discretized priors (hypothesis sets) and Bayesian updates.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "bayesmetro/channels.hpp"

namespace bm {

enum class SamplingMode { Grid, Importance };

/// Parameter domain used to clip resampling jitter.
struct Domain {
  enum class Shape { Unbounded, Interval, Ball };
  Shape shape = Shape::Unbounded;
  double lo = 0.0;  // Interval
  double hi = 0.0;  // Interval; radius for Ball
};

/// Cached channel data for k copies at every hypothesis point.
struct ChoiCache {
  int copies = 0;
  SystemLayout layout;
  /// Column j is vec(J_j^{(x)k}), column-major.
  CMatrix powers;
  /// Single-copy cost-reference Choi per point.
  std::vector<ChoiOperator> cost_choi;
  std::shared_ptr<const ChannelModel> channel;
};

class TesterSet;

class HypothesisSet {
 public:
  HypothesisSet() = default;

  /// Weights are normalized on construction; they must be nonnegative with
  /// positive sum.
  HypothesisSet(std::vector<RVector> points, RVector weights,
                SamplingMode mode = SamplingMode::Grid, Domain domain = {});

  std::size_t size() const { return points_.size(); }
  int param_dim() const {
    return points_.empty() ? 0 : static_cast<int>(points_[0].size());
  }
  const std::vector<RVector>& points() const { return points_; }
  const RVector& point(std::size_t j) const { return points_[j]; }
  const RVector& weights() const { return weights_; }
  SamplingMode mode() const { return mode_; }
  const Domain& domain() const { return domain_; }

  /// Quadrature estimate of the prior mass carried by the grid before
  /// normalization (grid priors with a known density); NaN otherwise.
  double raw_mass() const { return raw_mass_; }
  void set_raw_mass(double m) { raw_mass_ = m; }

  /// Same points and cache, new (normalized) weights.
  HypothesisSet with_weights(RVector weights) const;

  /// Copy with channel data for k copies attached.
  HypothesisSet with_cache(const ChannelModel& channel, int copies) const;
  bool has_cache() const { return cache_ != nullptr; }
  const ChoiCache& cache() const;

  /// P(i | theta_j) = Tr(T_i J_j^{(x)k}) as an N_O x N_H matrix.
  RMatrix probabilities(const TesterSet& testers) const;

  double effective_sample_size() const;

 private:
  std::vector<RVector> points_;
  RVector weights_;
  SamplingMode mode_ = SamplingMode::Grid;
  Domain domain_;
  double raw_mass_ = std::numeric_limits<double>::quiet_NaN();
  std::shared_ptr<const ChoiCache> cache_;
};

/// Haar density on the ball r < pi in exponential coordinates:
/// (1 / 2 pi^2) (sin r / r)^2.
double haar_density_su2(std::span<const double> theta);

/// Grid mode: Gauss-Legendre radial shells with angular points allocated in
/// proportion to shell mass.  Importance mode: Haar-random unit quaternions
/// with equal weights.
HypothesisSet haar_prior_su2(int n_points, SamplingMode mode,
                             std::uint64_t seed);

/// Equispaced grid including both end points (midpoint for n = 1).
HypothesisSet uniform_prior(double lo, double hi, int n_points);

/// Normalized density (e^{alpha sin^2(pi (x - lo)/(hi - lo))} - 1) /
/// ((hi - lo)(e^{alpha/2} I0(alpha/2) - 1)).
double sine_exp_density(double alpha, double lo, double hi, double x);
HypothesisSet sine_exp_prior(double alpha, double lo, double hi, int n_points);

/// p_j <- p_j Tr(T_s J_j^{(x)m}) / N.  The cache must hold m copies.
HypothesisSet posterior_update(const HypothesisSet& h, const TesterSet& testers,
                               int outcome);

/// Weights-only variant used by the Monte Carlo engine.
RVector posterior_weights(const RVector& prior, const RMatrix& likelihood,
                          int outcome);

struct ResampleSettings {
  bool enabled = false;
  double ess_threshold = 0.5;
  double jitter = 0.1;
};

/// Systematic resampling with Gaussian jitter when ESS < threshold * N.
/// The channel cache (if any) is rebuilt for the moved points.
HypothesisSet resample(const HypothesisSet& h, double ess_threshold,
                       std::uint64_t seed, double jitter = 0.1);

/// CSV with columns j, theta_0..theta_{q-1}, weight.
void write_hypotheses_csv(std::ostream& os, const HypothesisSet& h);

}  // namespace bm
