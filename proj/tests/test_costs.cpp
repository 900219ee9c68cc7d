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

#include <numbers>

#include "bayesmetro/costs.hpp"
#include "oracles.hpp"

using namespace bm;

namespace {

std::vector<RVector> scalars(std::initializer_list<double> v) {
  std::vector<RVector> out;
  for (double x : v) out.push_back(RVector::Constant(1, x));
  return out;
}

}  // namespace

TEST_CASE("cost kernels") {
  const double a[1] = {2.0}, b[1] = {1.5};
  CHECK(evaluate_cost({CostKind::RelativeMse}, a, b) == doctest::Approx(0.0625));
  CHECK(evaluate_cost({CostKind::CosSquared}, a, b) ==
        doctest::Approx(std::pow(std::cos(0.25), 2)));
  const double t[3] = {0.3, -0.2, 0.9}, same[3] = {0.3, -0.2, 0.9};
  CHECK(evaluate_cost({CostKind::FidelitySu2}, t, same) == doctest::Approx(1.0));
  CHECK(parse_cost("cos2") == CostKind::CosSquared);
  CHECK_THROWS_AS(parse_cost("nope"), Error);
  CHECK_THROWS_AS(evaluate_cost({CostKind::FidelitySu2}, a, b), Error);
  CHECK(CostKernel{CostKind::RelativeMse}.sense() == sdp::Sense::Minimize);
}

TEST_CASE("SU(2) Bayes estimator beats random candidates") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.8, 1.8);
  std::vector<RVector> pts;
  RVector w(40);
  for (int j = 0; j < 40; ++j) {
    RVector p(3);
    p << u(rng), u(rng), u(rng);
    pts.push_back(p);
    w(j) = std::abs(u(rng));
  }
  const CostKernel k{CostKind::FidelitySu2};
  auto objective = [&](const RVector& est) {
    double s = 0.0;
    for (int j = 0; j < 40; ++j) {
      s += w(j) * evaluate_cost(k, std::span<const double>(pts[j].data(), 3),
                                std::span<const double>(est.data(), 3));
    }
    return s / w.sum();
  };
  const RVector best = optimal_estimate(k, w, pts);
  const double v = objective(best);
  // Oracle: the value is the top eigenvalue of sum_j w_j q_j q_j^T.
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 40; ++j) {
    const Eigen::Vector4d q = su2_quaternion(std::span<const double>(pts[j].data(), 3)).vector();
    m += w(j) / w.sum() * q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  CHECK(v == doctest::Approx(es.eigenvalues()(3)).epsilon(1e-12));
  std::uniform_real_distribution<double> big(-3.0, 3.0);
  double best_random = 0.0;
  for (int t = 0; t < 2000; ++t) {
    RVector c(3);
    c << big(rng), big(rng), big(rng);
    if (c.norm() >= std::numbers::pi) continue;
    best_random = std::max(best_random, objective(c));
  }
  CHECK(best_random <= v + 1e-12);
}

TEST_CASE("scalar Bayes estimators against a brute-force scan") {
  const auto pts = scalars({1.0, 2.0, 4.0, 7.0, 11.0});
  RVector w(5);
  w << 0.1, 0.3, 0.2, 0.25, 0.15;
  auto expected = [&](const CostKernel& k, double x) {
    double s = 0.0;
    for (int j = 0; j < 5; ++j) {
      const double e[1] = {x};
      s += w(j) * evaluate_cost(k, std::span<const double>(pts[j].data(), 1), e);
    }
    return s;
  };
  for (CostKind kind : {CostKind::RelativeMse, CostKind::CosSquared}) {
    const CostKernel k{kind};
    const double est = optimal_estimate(k, w, pts)(0);
    const double v = expected(k, est);
    double worst = 0.0;  // largest improvement found by the scan
    for (double x = -12.0; x <= 12.0; x += 1e-3) {
      worst = std::max(worst, k.maximize() ? expected(k, x) - v : v - expected(k, x));
    }
    CHECK(worst <= 1e-12);
  }
  // Closed form of the relative-MSE estimator.
  double a = 0.0, b = 0.0;
  for (int j = 0; j < 5; ++j) {
    a += w(j) / pts[j](0);
    b += w(j) / (pts[j](0) * pts[j](0));
  }
  CHECK(optimal_estimator_relmse(w, pts) == doctest::Approx(a / b));
}

TEST_CASE("score is the probability-weighted cost") {
  const HypothesisSet h(scalars({1.0, 2.0, 3.0}), RVector::Ones(3));
  RMatrix p(2, 3);
  p << 0.8, 0.5, 0.1, 0.2, 0.5, 0.9;
  const EstimatorSet e{scalars({1.2, 2.8})};
  const CostKernel k{CostKind::RelativeMse};
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      const double r = (h.point(j)(0) - e.estimates[i](0)) / h.point(j)(0);
      s += p(i, j) * r * r / 3.0;
    }
  CHECK(score(k, h, p, e) == doctest::Approx(s));
  const RMatrix t = cost_table(k, h.points(), e);
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 2);

  // Updated estimators are per-outcome Bayes estimates, so the score can
  // only improve.
  const EstimatorSet u = update_all_estimators(k, h, p, &e);
  CHECK(score(k, h, p, u) <= score(k, h, p, e) + 1e-15);
}
