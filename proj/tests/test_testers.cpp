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

#include "bayesmetro/testers.hpp"
#include "oracles.hpp"

using namespace bm;

namespace {

const std::vector<Index> kDims{2, 2, 2, 2};  // I1 O1 I2 O2

HermitianOperator on_copies(const CMatrix& m) {
  return HermitianOperator(copies_layout(2, 2, 2), (m + m.adjoint()) / 2.0);
}

CMatrix scaled(const CMatrix& w, double trace) { return w * (trace / w.trace().real()); }

// sigma on I1 I2, identity on O1 O2, in I1 O1 I2 O2 order.
CMatrix parallel_w(const CMatrix& sigma) {
  CMatrix w = CMatrix::Zero(16, 16);
  for (Index r = 0; r < 16; ++r)
    for (Index c = 0; c < 16; ++c) {
      const auto a = oracle::digits(r, kDims), b = oracle::digits(c, kDims);
      if (a[1] != b[1] || a[3] != b[3]) continue;
      w(r, c) = sigma(a[0] * 2 + a[2], b[0] * 2 + b[2]);
    }
  return w;
}

// (sqrt sigma) C (sqrt sigma) (x) 1_O2 with C the Choi of a channel
// I1 O1 -> I2.
CMatrix sequential_w(std::mt19937_64& rng) {
  const CMatrix sigma = oracle::random_state(rng, 2);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma);
  const CMatrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                       es.eigenvectors().adjoint();
  const CMatrix c = oracle::choi(oracle::random_kraus(rng, 4, 2, 3));
  const CMatrix s = oracle::kron(oracle::kron(root, CMatrix::Identity(2, 2)),
                                 CMatrix::Identity(2, 2));
  return oracle::kron(s * c * s, CMatrix::Identity(2, 2));
}

// Exchanges the two copies (I1 O1) <-> (I2 O2).
CMatrix swap_copies(const CMatrix& w) {
  CMatrix out(16, 16);
  for (Index r = 0; r < 16; ++r)
    for (Index c = 0; c < 16; ++c) {
      auto a = oracle::digits(r, kDims), b = oracle::digits(c, kDims);
      std::swap(a[0], a[2]);
      std::swap(a[1], a[3]);
      std::swap(b[0], b[2]);
      std::swap(b[1], b[3]);
      out(oracle::index_of(a, kDims), oracle::index_of(b, kDims)) = w(r, c);
    }
  return out;
}

}  // namespace

TEST_CASE("strategy names") {
  CHECK(parse_strategy("seq") == StrategyKind::Sequential);
  CHECK(std::string(to_string(StrategyKind::General)) == "general");
  CHECK_THROWS_AS(parse_strategy("quantum-switch"), Error);
}

TEST_CASE("class hierarchy: parallel within sequential within general") {
  std::mt19937_64 rng(41);
  const auto par = constraints_parallel(2, 2, 2);
  const auto seq = constraints_sequential(2, 2, 2);
  const auto gen = constraints_general_k2(2, 2);
  for (int t = 0; t < 5; ++t) {
    const auto wp = on_copies(scaled(parallel_w(oracle::random_state(rng, 4)), par.trace_value));
    CHECK(constraint_residual(par, wp) < 1e-12);
    CHECK(constraint_residual(seq, wp) < 1e-12);
    CHECK(constraint_residual(gen, wp) < 1e-12);

    const CMatrix s = scaled(sequential_w(rng), seq.trace_value);
    const auto ws = on_copies(s);
    CHECK(constraint_residual(seq, ws) < 1e-12);
    CHECK(constraint_residual(gen, ws) < 1e-12);
    CHECK(constraint_residual(par, ws) > 1e-3);

    // An equal mixture of the two causal orders is a general tester but not
    // a sequential one.
    const auto wg = on_copies((s + swap_copies(s)) / 2.0);
    CHECK(constraint_residual(gen, wg) < 1e-12);
    CHECK(constraint_residual(seq, wg) > 1e-3);
  }
}

TEST_CASE("sequential constraints for three copies contain parallel ones") {
  std::mt19937_64 rng(42);
  const auto par = constraints_parallel(3, 2, 2);
  const auto seq = constraints_sequential(3, 2, 2);
  const std::vector<Index> dims{2, 2, 2, 2, 2, 2};
  const CMatrix sigma = oracle::random_state(rng, 8);
  CMatrix w = CMatrix::Zero(64, 64);
  for (Index r = 0; r < 64; ++r)
    for (Index c = 0; c < 64; ++c) {
      const auto a = oracle::digits(r, dims), b = oracle::digits(c, dims);
      if (a[1] != b[1] || a[3] != b[3] || a[5] != b[5]) continue;
      w(r, c) = sigma(a[0] * 4 + a[2] * 2 + a[4], b[0] * 4 + b[2] * 2 + b[4]);
    }
  w = scaled(w, par.trace_value);
  const HermitianOperator wp(copies_layout(3, 2, 2), w);
  CHECK(constraint_residual(par, wp) < 1e-12);
  CHECK(constraint_residual(seq, wp) < 1e-12);
}

TEST_CASE("complement basis annihilates feasible directions") {
  std::mt19937_64 rng(43);
  const auto seq = constraints_sequential(2, 2, 2);
  const CMatrix& basis = complement_basis(seq);
  // Two feasible testers differ by a vector orthogonal to every row of the
  // complement basis except the trace direction.
  const CMatrix a = scaled(sequential_w(rng), seq.trace_value);
  const CMatrix b = scaled(sequential_w(rng), seq.trace_value);
  const CMatrix d = a - b;
  const CVector dv = Eigen::Map<const CVector>(d.data(), d.size());
  CHECK((basis.adjoint() * dv).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(basis.rows() == 256);
  CHECK(&complement_basis(seq) == &basis);
}

TEST_CASE("solved testers are feasible and positive") {
  std::mt19937_64 rng(44);
  std::vector<CMatrix> obj;
  for (int i = 0; i < 3; ++i) {
    const CMatrix g = oracle::random_matrix(rng, 16, 16);
    obj.push_back(g * g.adjoint() / 16.0);
  }
  double prev = -1.0;
  for (StrategyKind k : {StrategyKind::Parallel, StrategyKind::Sequential, StrategyKind::General}) {
    const StrategyClass sc{k, 2};
    const TesterSolution s = solve_testers(sc, 2, 2, obj, sdp::Sense::Maximize);
    CHECK(s.diagnostics.status == sdp::Status::Optimal);
    CHECK(constraint_residual(constraints_for(sc, 2, 2), s.testers.sum()) < 1e-7);
    double v = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(s.testers[i].min_eigenvalue() > -1e-8);
      v += (obj[i] * s.testers[i].matrix()).trace().real();
    }
    CHECK(v == doctest::Approx(s.value).epsilon(1e-7));
    // Larger classes can only do better.
    CHECK(s.value >= prev - 2e-8);
    prev = s.value;
  }
}
