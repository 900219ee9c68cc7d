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
#include <sstream>

#include "bayesmetro/realization.hpp"
#include "oracles.hpp"

using namespace bm;

namespace {

// Testers from a random objective: feasible, generically full rank.
TesterSet random_testers(StrategyClass sc, std::mt19937_64& rng, int outcomes = 4) {
  const Index d = copies_layout(sc.copies, 2, 2).total_dim();
  std::vector<CMatrix> obj;
  for (int i = 0; i < outcomes; ++i) {
    const CMatrix g = oracle::random_matrix(rng, d, d);
    obj.push_back(g * g.adjoint() / static_cast<double>(d));
  }
  return solve_testers(sc, 2, 2, obj, sdp::Sense::Maximize).testers;
}

CMatrix power(const CMatrix& j, int k) {
  CMatrix out = j;
  for (int c = 1; c < k; ++c) out = oracle::kron(out, j);
  return out;
}

double reference_gap(const TesterSet& t, const std::vector<CMatrix>& kraus, const RVector& got) {
  const CMatrix jk = power(oracle::choi(kraus), t.strategy().copies);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double p = (t[i].matrix() * jk).trace().real();
    worst = std::max(worst, std::abs(p - got(static_cast<Index>(i))));
  }
  return worst;
}

}  // namespace

TEST_CASE("PSD roots") {
  std::mt19937_64 rng(61);
  const CMatrix v = oracle::random_matrix(rng, 4, 2);
  const CMatrix a = v * v.adjoint();  // rank 2
  const PsdRoots r = psd_roots(a);
  CHECK(r.rank == 2);
  CHECK((r.sqrt * r.sqrt - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.sqrt * r.pinv_sqrt - r.support).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((r.support * r.support - r.support).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("parallel realization round trip on random channels") {
  std::mt19937_64 rng(62);
  for (int k : {1, 2}) {
    const TesterSet t = random_testers(StrategyClass{StrategyKind::Parallel, k}, rng);
    const ParallelRealization r = realize_parallel(t);
    const RealizationChecks c = check(r);
    CHECK(c.povm_normalization < 1e-9);
    CHECK(c.povm_min_eigenvalue > -1e-9);
    CHECK(c.rho_trace_error < 1e-12);
    CHECK(c.rho_min_eigenvalue > -1e-9);
    for (int trial = 0; trial < 10; ++trial) {
      const auto kraus = oracle::random_kraus(rng, 2, 2, 1 + trial % 3);
      CHECK(reference_gap(t, kraus, realized_probabilities(r, kraus)) < 1e-9);
    }
  }
}

TEST_CASE("sequential realization round trip on random channels") {
  std::mt19937_64 rng(63);
  const TesterSet t = random_testers(StrategyClass{StrategyKind::Sequential, 2}, rng);
  const SequentialRealization r = realize_sequential_k2(t);
  const RealizationChecks c = check(r);
  CHECK(c.povm_normalization < 1e-9);
  CHECK(c.povm_min_eigenvalue > -1e-9);
  CHECK(c.phi_trace_preservation < 1e-9);
  CHECK(c.phi_min_eigenvalue > -1e-9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto kraus = oracle::random_kraus(rng, 2, 2, 1 + trial % 3);
    CHECK(reference_gap(t, kraus, realized_probabilities(r, kraus)) < 1e-9);
  }
  // A parallel tester is also a sequential one.
  const TesterSet tp = random_testers(StrategyClass{StrategyKind::Parallel, 2}, rng);
  const TesterSet as_seq(tp.elements(), StrategyClass{StrategyKind::Sequential, 2});
  const SequentialRealization rp = realize_sequential_k2(as_seq);
  const auto kraus = oracle::random_kraus(rng, 2, 2, 2);
  CHECK(reference_gap(as_seq, kraus, realized_probabilities(rp, kraus)) < 1e-9);
}

TEST_CASE("general tester as a block-diagonal process") {
  std::mt19937_64 rng(64);
  const TesterSet t = random_testers(StrategyClass{StrategyKind::General, 2}, rng, 3);
  const GeneralRealization r = realize_general(t);
  CHECK(r.outcomes == 3);
  CHECK(r.process.rows() == 48);
  const auto kraus = oracle::random_kraus(rng, 2, 2, 2);
  const CMatrix jk = power(oracle::choi(kraus), 2);
  CHECK(reference_gap(t, kraus, realized_probabilities(r, jk)) < 1e-12);
}

TEST_CASE("realization JSON layout") {
  std::mt19937_64 rng(65);
  const TesterSet t = random_testers(StrategyClass{StrategyKind::Parallel, 1}, rng, 2);
  std::ostringstream os;
  write_realization_json(os, realize_parallel(t));
  const auto j = nlohmann::json::parse(os.str());
  const auto& rho = j.at("rho");
  CHECK(rho.at("rows") == 4);
  CHECK(rho.at("data").size() == 16);
  CHECK(rho.at("data")[0].size() == 2);
  CHECK(j.at("povm").size() == 2);
  // Row-major: entry (0, 1) is the second pair.
  const CMatrix m = realize_parallel(t).rho;
  CHECK(rho.at("data")[1][0].get<double>() == doctest::Approx(m(0, 1).real()));
  CHECK(rho.at("data")[1][1].get<double>() == doctest::Approx(m(0, 1).imag()));
}

TEST_CASE("sequential realization needs k = 2") {
  std::mt19937_64 rng(66);
  const TesterSet t = random_testers(StrategyClass{StrategyKind::Parallel, 1}, rng, 2);
  CHECK_THROWS_AS(realize_sequential_k2(t), Error);
}
