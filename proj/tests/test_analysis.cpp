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

#include <doctest.h>

#include <json.hpp>
#include <numbers>
#include <sstream>

#include "bayesmetro/analysis.hpp"
#include "oracles.hpp"

using namespace bm;

TEST_CASE("thermometry beta vanishes") {
  const BetaScan s = scan_thermometry_beta(1.0, 20.0, 0.1, 5.0, 5);
  CHECK(s.norms.size() == 25);
  CHECK(s.theta.front() == 1.0);
  CHECK(s.time.back() == 5.0);
  CHECK(s.max_norm < 1e-8);
  // alpha is not zero, so the derivative is real.
  const KrausDerivatives d = thermometry_kraus_derivatives(3.0, {1.0, 1.0, 1.0});
  CHECK(d.alpha.norm() > 1e-3);
}

TEST_CASE("prior Fisher information of a Gaussian") {
  const double s = 0.5;
  const auto g = [&](double x) {
    return std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * std::numbers::pi));
  };
  CHECK(prior_fisher_info(g, -5.0, 5.0) == doctest::Approx(1.0 / (s * s)).epsilon(1e-4));
}

TEST_CASE("grid and closure Fisher information agree") {
  const double two_pi = 2.0 * std::numbers::pi;
  const auto f = [&](double x) { return sine_exp_density(10.0, 0.0, two_pi, x); };
  const double exact = prior_fisher_info(f, 0.0, two_pi);
  const HypothesisSet h = sine_exp_prior(10.0, 0.0, two_pi, 4000);
  CHECK(prior_fisher_info(h) == doctest::Approx(exact).epsilon(1e-2));
}

TEST_CASE("analytic SU(2) scores") {
  CHECK(analytic_su2_score(1) == doctest::Approx(0.5));
  CHECK(analytic_su2_score(2) == doctest::Approx(std::pow(std::cos(std::numbers::pi / 5), 2)));
  CHECK_THROWS_AS(analytic_su2_score(0), Error);
}

TEST_CASE("classical Fisher information of a Ramsey measurement") {
  // |+> probe, +/- measurement: p(+) = cos^2(theta t / 2), F = t^2.
  const double t = 1.7;
  const SystemLayout l = copies_layout(1, 2, 2);
  CMatrix plus = CMatrix::Constant(2, 2, 0.5);
  CMatrix minus = plus;
  minus(0, 1) = minus(1, 0) = -0.5;
  const TesterSet ts({HermitianOperator(l, oracle::kron(plus, plus)),
                      HermitianOperator(l, oracle::kron(plus, minus))},
                     StrategyClass{});
  const ChannelModel ch = ChannelModel::phase(t);
  CHECK(classical_fisher_info(ts, ch, 0.9) == doctest::Approx(t * t).epsilon(1e-6));

  const VanTreesReport v = van_trees_check(ts, ch, 0.9, 50.0, 0.99);
  CHECK(v.sharpness == doctest::Approx(1.0 - 1.0 / 200.0));
  CHECK(v.predicted == doctest::Approx(v.sharpness + t * t / (4.0 * 2500.0)).epsilon(1e-6));
  CHECK(v.discrepancy == doctest::Approx(0.99 - v.predicted));
}

TEST_CASE("analysis JSON") {
  AnalysisReport r;
  r.su2_scores = {{1, 0.5}};
  r.beta = scan_thermometry_beta(1.0, 2.0, 1.0, 2.0, 2);
  std::ostringstream os;
  write_analysis_json(os, r);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j.at("analytic_su2")[0].at("k") == 1);
  CHECK(j.at("thermometry_beta").at("norms").size() == 4);
  CHECK_FALSE(j.contains("van_trees"));
}
