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

#include "bayesmetro/costs.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace bm {

const char* to_string(CostKind kind) {
  switch (kind) {
    case CostKind::FidelitySu2:
      return "fidelity_su2";
    case CostKind::RelativeMse:
      return "relative_mse";
    case CostKind::CosSquared:
      return "cos_squared";
  }
  return "unknown";
}

CostKind parse_cost(const std::string& name) {
  if (name == "fidelity_su2" || name == "fidelity") return CostKind::FidelitySu2;
  if (name == "relative_mse" || name == "relmse") return CostKind::RelativeMse;
  if (name == "cos_squared" || name == "cos2") return CostKind::CosSquared;
  fail("unknown cost kernel '" + name + "'");
}

namespace {

void check_dims(const CostKernel& k, std::size_t a, std::size_t b) {
  const std::size_t want = k.kind == CostKind::FidelitySu2 ? 3 : 1;
  if (a != want || b != want) {
    fail(std::string(to_string(k.kind)) + " expects " + std::to_string(want) +
         "-dimensional parameters");
  }
}

// 4 x N matrix of quaternions.
RMatrix quaternions(const std::vector<RVector>& points) {
  RMatrix q(4, static_cast<Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto& p = points[j];
    q.col(static_cast<Index>(j)) =
        su2_quaternion(std::span<const double>(p.data(), p.size())).vector();
  }
  return q;
}

Quaternion top_eigenvector(const Eigen::Matrix4d& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(k);
  const Eigen::Vector4d ev = es.eigenvalues();
  const double top = ev(3);
  const double tol = 1e-10 * std::max(1.0, std::abs(top));
  int first = 3;
  while (first > 0 && top - ev(first - 1) <= tol) --first;
  Eigen::Vector4d q;
  if (first == 3) {
    q = es.eigenvectors().col(3);
  } else {
    const Eigen::MatrixXd basis = es.eigenvectors().rightCols(4 - first);
    q.setZero();
    for (int e = 0; e < 4; ++e) {
      const Eigen::Vector4d proj = basis * basis.row(e).transpose();
      if (proj.norm() > 1e-8) {
        q = proj.normalized();
        break;
      }
    }
  }
  if (q(0) < 0.0 || (q(0) == 0.0 && q.tail<3>().sum() < 0.0)) q = -q;
  return Quaternion{{q(0), q(1), q(2), q(3)}};
}

double mass(const RVector& w) {
  const double s = w.sum();
  if (!(s > 1e-300)) fail("estimator update on a posterior with zero mass");
  return s;
}

}  // namespace

double evaluate_cost(const CostKernel& kernel, std::span<const double> theta,
                     std::span<const double> theta_hat) {
  check_dims(kernel, theta.size(), theta_hat.size());
  switch (kernel.kind) {
    case CostKind::FidelitySu2: {
      const double d = su2_quaternion(theta).dot(su2_quaternion(theta_hat));
      return d * d;
    }
    case CostKind::RelativeMse: {
      if (theta[0] == 0.0) fail("relative MSE is undefined at theta = 0");
      const double r = (theta[0] - theta_hat[0]) / theta[0];
      return r * r;
    }
    case CostKind::CosSquared: {
      const double c = std::cos((theta[0] - theta_hat[0]) / 2.0);
      return c * c;
    }
  }
  return 0.0;
}

Quaternion optimal_estimator_su2(const RVector& weights,
                                 const std::vector<RVector>& points) {
  mass(weights);
  const RMatrix q = quaternions(points);
  const Eigen::Matrix4d k = q * weights.asDiagonal() * q.transpose();
  return top_eigenvector(k / weights.sum());
}

double optimal_estimator_relmse(const RVector& weights,
                                const std::vector<RVector>& points) {
  mass(weights);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double t = points[j](0);
    if (!(t > 0.0)) fail("relative MSE estimator needs positive parameters");
    m1 += weights(static_cast<Index>(j)) / t;
    m2 += weights(static_cast<Index>(j)) / (t * t);
  }
  return m1 / m2;
}

double optimal_estimator_cos(const RVector& weights,
                             const std::vector<RVector>& points) {
  const double total = mass(weights);
  cplx r = 0.0;
  Index mode = 0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const Index jj = static_cast<Index>(j);
    r += weights(jj) * std::polar(1.0, points[j](0));
    if (weights(jj) > weights(mode)) mode = jj;
  }
  if (std::abs(r) / total < 1e-12) return points[static_cast<std::size_t>(mode)](0);
  return std::arg(r);
}

RVector optimal_estimate(const CostKernel& kernel, const RVector& weights,
                         const std::vector<RVector>& points) {
  switch (kernel.kind) {
    case CostKind::FidelitySu2:
      return su2_parameters(optimal_estimator_su2(weights, points));
    case CostKind::RelativeMse:
      return RVector::Constant(1, optimal_estimator_relmse(weights, points));
    case CostKind::CosSquared:
      return RVector::Constant(1, optimal_estimator_cos(weights, points));
  }
  fail("unknown cost kernel");
}

RMatrix cost_table(const CostKernel& kernel, const std::vector<RVector>& points,
                   const EstimatorSet& estimators) {
  const Index n = static_cast<Index>(points.size());
  const Index no = static_cast<Index>(estimators.size());
  RMatrix c(n, no);
  if (kernel.kind == CostKind::FidelitySu2) {
    for (const auto& e : estimators.estimates) check_dims(kernel, 3, e.size());
    const RMatrix q = quaternions(points);
    const RMatrix qh = quaternions(estimators.estimates);
    c = (q.transpose() * qh).array().square().matrix();
    return c;
  }
  for (Index j = 0; j < n; ++j) {
    const auto& p = points[static_cast<std::size_t>(j)];
    for (Index i = 0; i < no; ++i) {
      const auto& e = estimators.estimates[static_cast<std::size_t>(i)];
      c(j, i) = evaluate_cost(kernel, std::span<const double>(p.data(), p.size()),
                              std::span<const double>(e.data(), e.size()));
    }
  }
  return c;
}

double score(const CostKernel& kernel, const HypothesisSet& h,
             const RMatrix& probabilities, const EstimatorSet& estimators) {
  const RMatrix c = cost_table(kernel, h.points(), estimators);
  if (probabilities.rows() != c.cols() || probabilities.cols() != c.rows()) {
    fail("score: probability table shape does not match the estimators");
  }
  // sum_j p_j sum_i c_ji P_ij
  const RVector per_point =
      (c.array() * probabilities.transpose().array()).rowwise().sum();
  return h.weights().dot(per_point);
}

EstimatorSet update_all_estimators(const CostKernel& kernel,
                                   const HypothesisSet& h,
                                   const RMatrix& probabilities,
                                   const EstimatorSet* previous) {
  const Index no = probabilities.rows();
  if (probabilities.cols() != static_cast<Index>(h.size())) {
    fail("update_all_estimators: probability table has the wrong width");
  }
  if (previous && previous->size() != static_cast<std::size_t>(no)) {
    fail("update_all_estimators: previous estimator count mismatch");
  }
  EstimatorSet out;
  out.estimates.resize(static_cast<std::size_t>(no));
  RMatrix q;
  if (kernel.kind == CostKind::FidelitySu2) q = quaternions(h.points());
  for (Index i = 0; i < no; ++i) {
    const RVector w =
        (h.weights().array() * probabilities.row(i).transpose().array().max(0.0))
            .matrix();
    const double m = w.sum();
    const auto si = static_cast<std::size_t>(i);
    if (!(m > 1e-300)) {
      out.estimates[si] = previous ? previous->estimates[si]
                                   : optimal_estimate(kernel, h.weights(),
                                                      h.points());
      continue;
    }
    if (kernel.kind == CostKind::FidelitySu2) {
      const Eigen::Matrix4d k = q * (w / m).asDiagonal() * q.transpose();
      out.estimates[si] = su2_parameters(top_eigenvector(k));
    } else {
      out.estimates[si] = optimal_estimate(kernel, w, h.points());
    }
  }
  return out;
}

}  // namespace bm
