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

// Analytic cross-checks: thermometry Kraus derivatives, prior Fisher
// information, the Van Trees sharp-prior estimate and closed-form scores.

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bayesmetro/priors.hpp"
#include "bayesmetro/testers.hpp"

namespace bm {

/// Derivatives of the canonical thermometry Kraus set with respect to the
/// occupation N_B, by central differences with step rel_step * N_B.
struct KrausDerivatives {
  CMatrix alpha;  // sum_k dK^H dK
  CMatrix beta;   // i sum_k dK^H K
};
KrausDerivatives thermometry_kraus_derivatives(double theta,
                                               const ThermometryParams& params,
                                               double rel_step = 1e-5);
CMatrix thermometry_beta(double theta, const ThermometryParams& params,
                         double rel_step = 1e-5);

struct BetaScan {
  std::vector<double> theta;
  std::vector<double> time;
  /// Operator norm of beta, row-major over (theta, time).
  std::vector<double> norms;
  double max_norm = 0.0;
};
/// n x n grid, theta in [theta_lo, theta_hi] and t in [t_lo, t_hi], both
/// end points included.
BetaScan scan_thermometry_beta(double theta_lo, double theta_hi, double t_lo,
                               double t_hi, int n, double energy = 1.0,
                               double spectral_density = 1.0);

/// F0 = int p (d log p)^2 by midpoint quadrature on `cells` cells; cells
/// with p < 1e-12 are skipped.
double prior_fisher_info(const std::function<double(double)>& density,
                         double lo, double hi, int cells = 20000);
/// Same from an equispaced one-dimensional grid prior.
double prior_fisher_info(const HypothesisSet& h);

/// cos^2(pi / (k + 3)).
double analytic_su2_score(int k);

/// Classical Fisher information of p(i | theta) = Tr(T_i J_theta^{(x)k}) at
/// theta0, two-sided differences with step h; outcomes with p < 1e-12 are
/// skipped.
double classical_fisher_info(const TesterSet& testers,
                             const ChannelModel& channel, double theta0,
                             double h = 1e-4);

struct VanTreesReport {
  double sharpness = 0.0;         // C = 1 - 1/(4 F0)
  double prior_fisher = 0.0;      // F0
  double strategy_fisher = 0.0;   // F*(theta0)
  double theta0 = 0.0;
  double predicted = 0.0;         // C + F*/(4 F0^2)
  double observed = 0.0;
  double discrepancy = 0.0;       // observed - predicted
};
VanTreesReport van_trees_check(const TesterSet& testers,
                               const ChannelModel& channel, double theta0,
                               double prior_fisher, double observed_score);

struct AnalysisReport {
  std::optional<BetaScan> beta;
  /// One entry per strategy class label.
  std::vector<std::pair<std::string, VanTreesReport>> van_trees;
  std::vector<std::pair<int, double>> su2_scores;
};
void write_analysis_json(std::ostream& os, const AnalysisReport& report);

}  // namespace bm
