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

#include "bayesmetro/analysis.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace bm {

namespace {

using nlohmann::json;

double operator_norm(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) {
    v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  return v;
}

}  // namespace

KrausDerivatives thermometry_kraus_derivatives(double theta,
                                               const ThermometryParams& params,
                                               double rel_step) {
  const double n = bose_occupation(theta, params.energy);
  const double h = rel_step * n;
  const auto k = thermometry_kraus_from_occupation(n, params);
  const auto kp = thermometry_kraus_from_occupation(n + h, params);
  const auto km = thermometry_kraus_from_occupation(n - h, params);
  KrausDerivatives d;
  d.alpha = CMatrix::Zero(2, 2);
  d.beta = CMatrix::Zero(2, 2);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const CMatrix dk = (kp[i] - km[i]) / (2.0 * h);
    d.alpha += dk.adjoint() * dk;
    d.beta += cplx(0.0, 1.0) * dk.adjoint() * k[i];
  }
  return d;
}

CMatrix thermometry_beta(double theta, const ThermometryParams& params,
                         double rel_step) {
  return thermometry_kraus_derivatives(theta, params, rel_step).beta;
}

BetaScan scan_thermometry_beta(double theta_lo, double theta_hi, double t_lo,
                               double t_hi, int n, double energy,
                               double spectral_density) {
  if (n < 1) fail("beta scan needs at least one grid point");
  BetaScan s;
  s.theta = linspace(theta_lo, theta_hi, n);
  s.time = linspace(t_lo, t_hi, n);
  for (double th : s.theta) {
    for (double t : s.time) {
      ThermometryParams p{energy, spectral_density, t};
      const double v = operator_norm(thermometry_beta(th, p));
      s.norms.push_back(v);
      s.max_norm = std::max(s.max_norm, v);
    }
  }
  return s;
}

double prior_fisher_info(const std::function<double(double)>& density,
                         double lo, double hi, int cells) {
  if (!(hi > lo)) fail("prior Fisher information needs hi > lo");
  if (cells < 2) fail("prior Fisher information needs at least two cells");
  const double dx = (hi - lo) / cells;
  const double h = 1e-3 * dx;
  double f = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double x = lo + (c + 0.5) * dx;
    const double p = density(x);
    if (p < 1e-12) continue;
    const double dp = (density(x + h) - density(x - h)) / (2.0 * h);
    f += dp * dp / p * dx;
  }
  return f;
}

double prior_fisher_info(const HypothesisSet& h) {
  if (h.param_dim() != 1) fail("prior Fisher information needs a 1-D prior");
  const auto n = static_cast<Index>(h.size());
  if (n < 3) fail("prior Fisher information needs at least three points");
  const double dx = h.point(1)(0) - h.point(0)(0);
  const RVector& w = h.weights();
  double f = 0.0;
  for (Index j = 1; j + 1 < n; ++j) {
    const double p = w(j) / dx;
    if (p < 1e-12) continue;
    const double dp = (w(j + 1) - w(j - 1)) / (2.0 * dx * dx);
    f += dp * dp / p * dx;
  }
  return f;
}

double analytic_su2_score(int k) {
  if (k < 1) fail("analytic SU(2) score needs k >= 1");
  const double c = std::cos(std::numbers::pi / (k + 3));
  return c * c;
}

double classical_fisher_info(const TesterSet& testers,
                             const ChannelModel& channel, double theta0,
                             double h) {
  if (channel.param_dim() != 1) fail("Fisher information needs one parameter");
  const int k = testers.strategy().copies;
  auto probs = [&](double th) {
    const double v[1] = {th};
    const HermitianOperator j = kron_copies(channel.choi(v), k);
    RVector p(static_cast<Index>(testers.size()));
    for (std::size_t i = 0; i < testers.size(); ++i) {
      p(static_cast<Index>(i)) = inner(testers[i], j);
    }
    return p;
  };
  const RVector p0 = probs(theta0);
  const RVector dp = (probs(theta0 + h) - probs(theta0 - h)) / (2.0 * h);
  double f = 0.0;
  for (Index i = 0; i < p0.size(); ++i) {
    if (p0(i) < 1e-12) continue;
    f += dp(i) * dp(i) / p0(i);
  }
  return f;
}

VanTreesReport van_trees_check(const TesterSet& testers,
                               const ChannelModel& channel, double theta0,
                               double prior_fisher, double observed_score) {
  if (!(prior_fisher > 0.0)) fail("Van Trees check needs F0 > 0");
  VanTreesReport r;
  r.theta0 = theta0;
  r.prior_fisher = prior_fisher;
  r.sharpness = 1.0 - 1.0 / (4.0 * prior_fisher);
  r.strategy_fisher = classical_fisher_info(testers, channel, theta0);
  r.predicted =
      r.sharpness + r.strategy_fisher / (4.0 * prior_fisher * prior_fisher);
  r.observed = observed_score;
  r.discrepancy = observed_score - r.predicted;
  return r;
}

void write_analysis_json(std::ostream& os, const AnalysisReport& report) {
  json j = json::object();
  if (report.beta) {
    const BetaScan& b = *report.beta;
    j["thermometry_beta"] = {{"theta", b.theta},
                             {"time", b.time},
                             {"norms", b.norms},
                             {"max_norm", b.max_norm}};
  }
  if (!report.van_trees.empty()) {
    json a = json::array();
    for (const auto& [label, v] : report.van_trees) {
      a.push_back({{"class", label},
                   {"sharpness", v.sharpness},
                   {"prior_fisher", v.prior_fisher},
                   {"strategy_fisher", v.strategy_fisher},
                   {"theta0", v.theta0},
                   {"predicted", v.predicted},
                   {"observed", v.observed},
                   {"discrepancy", v.discrepancy}});
    }
    j["van_trees"] = a;
  }
  if (!report.su2_scores.empty()) {
    json a = json::array();
    for (const auto& [k, s] : report.su2_scores) a.push_back({{"k", k}, {"score", s}});
    j["analytic_su2"] = a;
  }
  os << j.dump(2) << "\n";
}

}  // namespace bm
