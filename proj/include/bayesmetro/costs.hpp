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

// Cost kernels and Bayes-optimal estimators.

#pragma once

#include <string>
#include <vector>

#include "bayesmetro/channels.hpp"
#include "bayesmetro/priors.hpp"
#include "bayesmetro/sdp.hpp"

namespace bm {

enum class CostKind { FidelitySu2, RelativeMse, CosSquared };

struct CostKernel {
  CostKind kind = CostKind::FidelitySu2;

  /// FidelitySu2 and CosSquared are rewards; RelativeMse is a loss.
  bool maximize() const { return kind != CostKind::RelativeMse; }
  sdp::Sense sense() const {
    return maximize() ? sdp::Sense::Maximize : sdp::Sense::Minimize;
  }
  /// Value of a perfect estimate.
  double ideal() const { return maximize() ? 1.0 : 0.0; }
  /// True when `a` is at least as good as `b`.
  bool better_or_equal(double a, double b, double slack = 0.0) const {
    return maximize() ? a >= b - slack : a <= b + slack;
  }
};

const char* to_string(CostKind kind);
CostKind parse_cost(const std::string& name);

double evaluate_cost(const CostKernel& kernel, std::span<const double> theta,
                     std::span<const double> theta_hat);

struct EstimatorSet {
  std::vector<RVector> estimates;

  std::size_t size() const { return estimates.size(); }
};

/// Top eigenvector of K = sum_j w_j q_j q_j^T with q0 >= 0.  Degenerate top
/// eigenspaces resolve to the eigenspace projection of e0, then e1, ...
Quaternion optimal_estimator_su2(const RVector& weights,
                                 const std::vector<RVector>& points);

/// <1/theta> / <1/theta^2>.
double optimal_estimator_relmse(const RVector& weights,
                                const std::vector<RVector>& points);

/// Circular mean arg(sum_j w_j e^{i theta_j}); falls back to the posterior
/// mode when the resultant is below 1e-12.
double optimal_estimator_cos(const RVector& weights,
                             const std::vector<RVector>& points);

/// Dispatches on the kernel; returns the estimate as a parameter vector.
RVector optimal_estimate(const CostKernel& kernel, const RVector& weights,
                         const std::vector<RVector>& points);

/// N_H x N_O table c(theta_j, est_i).
RMatrix cost_table(const CostKernel& kernel, const std::vector<RVector>& points,
                   const EstimatorSet& estimators);

/// S = sum_ij p_j c(theta_j, est_i) P(i|j) with P as N_O x N_H.
double score(const CostKernel& kernel, const HypothesisSet& h,
             const RMatrix& probabilities, const EstimatorSet& estimators);

/// Per-outcome Bayes update: w_j ∝ p_j P(i|j).  Outcomes whose total mass is
/// below 1e-300 keep their entry from `previous` (if provided).
EstimatorSet update_all_estimators(const CostKernel& kernel,
                                   const HypothesisSet& h,
                                   const RMatrix& probabilities,
                                   const EstimatorSet* previous = nullptr);

}  // namespace bm
