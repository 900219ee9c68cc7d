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

#include "bayesmetro/operator.hpp"
#include "oracles.hpp"

using namespace bm;

namespace {

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

HermitianOperator herm(const SystemLayout& l, std::mt19937_64& rng) {
  return HermitianOperator(l, oracle::random_hermitian(rng, l.total_dim()));
}

}  // namespace

TEST_CASE("layout bookkeeping") {
  const SystemLayout l{{"A", 2}, {"B", 3}, {"C", 2}};
  CHECK(l.total_dim() == 12);
  CHECK(l.position("B") == 1);
  CHECK(l.dim("C") == 2);
  CHECK_THROWS_AS(l.concat(SystemLayout{{"B", 2}}), Error);
  CHECK(copies_layout(2, 2, 3).to_string().find("O2") != std::string::npos);
  CHECK(copies_layout(2, 2, 3).total_dim() == 36);
}

TEST_CASE("non-Hermitian input is rejected") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianOperator(SystemLayout{{"A", 2}}, m), Error);
  CHECK_THROWS_AS(HermitianOperator(SystemLayout{{"A", 3}}, CMatrix::Identity(2, 2)), Error);
}

TEST_CASE("partial trace matches the index-loop oracle") {
  std::mt19937_64 rng(1);
  const SystemLayout l{{"A", 2}, {"B", 3}, {"C", 2}};
  const HermitianOperator a = herm(l, rng);
  const std::vector<Index> dims{2, 3, 2};
  for (const auto& [labels, mask] :
       std::vector<std::pair<std::vector<std::string>, std::vector<bool>>>{
           {{"A"}, {true, false, false}},
           {{"B"}, {false, true, false}},
           {{"A", "C"}, {true, false, true}},
           {{"C", "B"}, {false, true, true}}}) {
    const HermitianOperator t = partial_trace(a, labels);
    CHECK(max_diff(t.matrix(), oracle::partial_trace(a.matrix(), dims, mask)) < 1e-12);
  }
}

TEST_CASE("permute reorders Kronecker factors") {
  std::mt19937_64 rng(2);
  const HermitianOperator a = herm(SystemLayout{{"A", 2}}, rng);
  const HermitianOperator b = herm(SystemLayout{{"B", 3}}, rng);
  const std::vector<std::string> order{"B", "A"};
  const HermitianOperator ab = kron(a, b);
  const HermitianOperator ba = permute(ab, order);
  CHECK(max_diff(ba.matrix(), oracle::kron(b.matrix(), a.matrix())) < 1e-13);
  const std::vector<std::string> back{"A", "B"};
  CHECK(max_diff(permute(ba, back).matrix(), ab.matrix()) < 1e-13);
}

TEST_CASE("partial transpose and trace-and-replace") {
  std::mt19937_64 rng(3);
  const SystemLayout l{{"A", 2}, {"B", 2}};
  const HermitianOperator a = herm(SystemLayout{{"A", 2}}, rng);
  const HermitianOperator b = herm(SystemLayout{{"B", 2}}, rng);
  const std::vector<std::string> lb{"B"};
  CHECK(max_diff(partial_transpose(kron(a, b), lb).matrix(),
                 oracle::kron(a.matrix(), b.matrix().transpose())) < 1e-13);
  const HermitianOperator w = herm(l, rng);
  const HermitianOperator r = trace_and_replace(w, lb);
  const CMatrix expect =
      oracle::kron(oracle::partial_trace(w.matrix(), {2, 2}, {false, true}),
                   CMatrix::Identity(2, 2) / 2.0);
  CHECK(max_diff(r.matrix(), expect) < 1e-13);
  // Idempotent.
  CHECK(max_diff(trace_and_replace(r, lb).matrix(), r.matrix()) < 1e-13);
}

TEST_CASE("kron_copies labels and values") {
  std::mt19937_64 rng(4);
  const HermitianOperator j = herm(SystemLayout{{"I", 2}, {"O", 2}}, rng);
  const HermitianOperator j2 = kron_copies(j, 2);
  CHECK(j2.layout() == copies_layout(2, 2, 2));
  CHECK(max_diff(j2.matrix(), oracle::kron(j.matrix(), j.matrix())) < 1e-12);
}

TEST_CASE("Choi from Kraus matches the definition and is trace preserving") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto k = oracle::random_kraus(rng, 2, 3, 3);
    const ChoiOperator j = choi_from_kraus(k, "I", "O");
    CHECK(max_diff(j.matrix(), oracle::choi(k)) < 1e-12);
    const std::vector<std::string> lo{"O"};
    CHECK(max_diff(partial_trace(j, lo).matrix(), CMatrix::Identity(2, 2)) < 1e-12);
    CHECK(j.min_eigenvalue() > -1e-12);
  }
  std::vector<CMatrix> bad{CMatrix::Identity(2, 2) * 0.5};
  CHECK_THROWS_AS(choi_from_kraus(bad, "I", "O"), Error);
}

TEST_CASE("apply_choi reproduces the Kraus action") {
  std::mt19937_64 rng(6);
  const auto k = oracle::random_kraus(rng, 2, 2, 2);
  const ChoiOperator j = choi_from_kraus(k, "I", "O");
  const CMatrix rho = oracle::random_state(rng, 2);
  const HermitianOperator state(SystemLayout{{"I", 2}}, rho);
  const std::vector<std::string> in{"I"};
  const HermitianOperator out = apply_choi(state, j, in);
  CMatrix expect = CMatrix::Zero(2, 2);
  for (const auto& a : k) expect += a * rho * a.adjoint();
  CHECK(max_diff(out.matrix(), expect) < 1e-12);

  // With a spectator system the channel acts on I only.
  const CMatrix big = oracle::random_state(rng, 4);
  const HermitianOperator s2(SystemLayout{{"R", 2}, {"I", 2}}, big);
  const HermitianOperator o2 = apply_choi(s2, j, in);
  CMatrix e2 = CMatrix::Zero(4, 4);
  for (const auto& a : k) {
    const CMatrix ka = oracle::kron(CMatrix::Identity(2, 2), a);
    e2 += ka * big * ka.adjoint();
  }
  CHECK(max_diff(o2.matrix(), e2) < 1e-12);
}

TEST_CASE("extend_to tensors identities in place") {
  std::mt19937_64 rng(7);
  const HermitianOperator a = herm(SystemLayout{{"B", 2}}, rng);
  const SystemLayout target{{"A", 3}, {"B", 2}};
  CHECK(max_diff(extend_to(a, target).matrix(),
                 oracle::kron(CMatrix::Identity(3, 3), a.matrix())) < 1e-13);
}

TEST_CASE("inner product is Re Tr(AB)") {
  std::mt19937_64 rng(8);
  const SystemLayout l{{"A", 3}};
  const HermitianOperator a = herm(l, rng), b = herm(l, rng);
  CHECK(inner(a, b) == doctest::Approx((a.matrix() * b.matrix()).trace().real()).epsilon(1e-12));
}
