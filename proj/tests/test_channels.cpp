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

#include <unsupported/Eigen/MatrixFunctions>

#include "bayesmetro/channels.hpp"
#include "oracles.hpp"

using namespace bm;

namespace {

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

CMatrix pauli(int i) {
  CMatrix s = CMatrix::Zero(2, 2);
  if (i == 0) {
    s(0, 1) = s(1, 0) = 1.0;
  } else if (i == 1) {
    s(0, 1) = cplx(0, -1);
    s(1, 0) = cplx(0, 1);
  } else {
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
  }
  return s;
}

RVector random_ball_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RVector p(3);
  do {
    p << u(rng), u(rng), u(rng);
  } while (p.norm() >= 1.0);
  return p * radius;
}

}  // namespace

TEST_CASE("SU(2) unitary equals the matrix exponential") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const RVector th = random_ball_point(rng, 3.1);
    CMatrix gen = CMatrix::Zero(2, 2);
    for (int i = 0; i < 3; ++i) gen += th(i) * pauli(i);
    const CMatrix expect = (cplx(0, -1) * gen).exp();
    const Su2Element e = su2_unitary(std::span<const double>(th.data(), 3));
    CHECK(max_diff(e.unitary, expect) < 1e-12);
    CHECK(std::abs(e.quaternion.norm() - 1.0) < 1e-12);
    // Round trip through the quaternion chart.
    const RVector back = su2_parameters(e.quaternion);
    CHECK((back - th).norm() < 1e-9);
  }
}

TEST_CASE("SU(2) channel Choi is the unitary's Choi") {
  std::mt19937_64 rng(12);
  const ChannelModel ch = ChannelModel::su2();
  CHECK(ch.param_dim() == 3);
  const RVector th = random_ball_point(rng, 2.0);
  const std::span<const double> sp(th.data(), 3);
  const CMatrix u = su2_unitary(sp).unitary;
  CHECK(max_diff(ch.choi(sp).matrix(), oracle::choi({u})) < 1e-12);
  CHECK(max_diff(unitary_choi(u).matrix(), oracle::choi({u})) < 1e-12);
}

TEST_CASE("amplitude damping") {
  for (double p : {0.0, 0.3, 1.0}) {
    const auto k = amplitude_damping_kraus(p);
    CMatrix s = CMatrix::Zero(2, 2);
    for (const auto& a : k) s += a.adjoint() * a;
    CHECK(max_diff(s, CMatrix::Identity(2, 2)) < 1e-14);
  }
  // p = 1 resets to the ground state.
  const auto k = amplitude_damping_kraus(1.0);
  std::mt19937_64 rng(13);
  const CMatrix rho = oracle::random_state(rng, 2);
  CMatrix out = CMatrix::Zero(2, 2);
  for (const auto& a : k) out += a * rho * a.adjoint();
  CHECK(std::abs(out(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("noisy SU(2) composes Kraus operators noise after unitary") {
  std::mt19937_64 rng(14);
  const double p = 0.4;
  const ChannelModel ch = compose(ChannelModel::amplitude_damping(p), ChannelModel::su2());
  const RVector th = random_ball_point(rng, 2.5);
  const std::span<const double> sp(th.data(), 3);
  const CMatrix u = su2_unitary(sp).unitary;
  std::vector<CMatrix> k;
  for (const auto& n : amplitude_damping_kraus(p)) k.push_back(n * u);
  CHECK(max_diff(ch.choi(sp).matrix(), oracle::choi(k)) < 1e-12);
  // The cost reference stays the noiseless unitary.
  CHECK(max_diff(ch.cost_choi(sp).matrix(), oracle::choi({u})) < 1e-12);
}

TEST_CASE("phase channel") {
  const double theta = 0.7, t = 1.3;
  const CMatrix u = phase_unitary(theta, t);
  CHECK(std::abs(u(0, 0) - std::exp(cplx(0, -theta * t / 2))) < 1e-14);
  CHECK(std::abs(u(1, 1) - std::exp(cplx(0, theta * t / 2))) < 1e-14);
  const ChannelModel ch = ChannelModel::phase(t);
  const double v[1] = {theta};
  CHECK(max_diff(ch.choi(v).matrix(), oracle::choi({u})) < 1e-13);
}

TEST_CASE("thermometry channel") {
  const ThermometryParams prm{1.0, 1.0, 0.8};
  for (double theta : {0.5, 1.0, 5.0, 20.0}) {
    const auto k = thermometry_kraus(theta, prm);
    CMatrix s = CMatrix::Zero(2, 2);
    for (const auto& a : k) s += a.adjoint() * a;
    CHECK(max_diff(s, CMatrix::Identity(2, 2)) < 1e-12);
    CHECK(max_diff(thermometry_choi(theta, prm).matrix(), oracle::choi(k)) < 1e-12);
  }
  // Long interaction: every input thermalizes to the Gibbs state,
  // populations in the ratio e^{-energy/theta}.
  const ThermometryParams long_t{1.0, 1.0, 60.0};
  const double theta = 2.0;
  std::mt19937_64 rng(15);
  const CMatrix rho = oracle::random_state(rng, 2);
  CMatrix out = CMatrix::Zero(2, 2);
  for (const auto& a : thermometry_kraus(theta, long_t)) out += a * rho * a.adjoint();
  CHECK(out(1, 1).real() / out(0, 0).real() == doctest::Approx(std::exp(-1.0 / theta)).epsilon(1e-10));
  CHECK(std::abs(out(0, 1)) < 1e-10);
  CHECK(bose_occupation(theta, 1.0) == doctest::Approx(1.0 / (std::exp(0.5) - 1.0)));
}

TEST_CASE("thermometry Choi against the closed form in output-first order") {
  // Closed form written as sum_a vec(K_a) vec(K_a)^dag with row-major vec,
  // so factors are (output, input); swap to compare.
  const ThermometryParams prm{1.0, 1.0, 0.7};
  for (double theta : {1.0, 4.0, 20.0}) {
    const double n = 1.0 / std::expm1(1.0 / theta);
    const double g = std::exp(-(2 * n + 1) * prm.time);
    const double z = 2 * n + 1;
    CMatrix printed = CMatrix::Zero(4, 4);
    printed(0, 0) = (1 + n * (g + 1)) / z;
    printed(1, 1) = (n + 1) * (1 - g) / z;
    printed(2, 2) = n * (1 - g) / z;
    printed(3, 3) = (n + g * (1 + n)) / z;
    printed(0, 3) = printed(3, 0) = std::exp(-(2 * n + 1) * prm.time / 2);
    CMatrix swapped(4, 4);
    const Index perm[4] = {0, 2, 1, 3};
    for (Index a = 0; a < 4; ++a)
      for (Index b = 0; b < 4; ++b) swapped(perm[a], perm[b]) = printed(a, b);
    CHECK(max_diff(thermometry_choi(theta, prm).matrix(), swapped) < 1e-12);
  }
}

TEST_CASE("channel argument checks") {
  const ChannelModel ch = ChannelModel::su2();
  const double two[2] = {0.1, 0.2};
  CHECK_THROWS_AS(ch.choi(two), Error);
  CHECK_THROWS_AS(ChannelModel::amplitude_damping(1.5), Error);
}
