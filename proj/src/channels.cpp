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

#include "bayesmetro/channels.hpp"

#include <cmath>
#include <sstream>

namespace bm {

namespace {

constexpr cplx kI{0.0, 1.0};

// sin(r)/r with a series below r < 1e-6.
double sinc(double r) {
  if (std::abs(r) < 1e-6) return 1.0 - r * r / 6.0;
  return std::sin(r) / r;
}

void check_theta(std::span<const double> theta, std::size_t n,
                 const char* who) {
  if (theta.size() != n) {
    fail(std::string(who) + ": expected " + std::to_string(n) +
         " parameter(s), got " + std::to_string(theta.size()));
  }
}

void check_thermo(double theta, const ThermometryParams& p) {
  if (!(theta > 0.0)) fail("thermometry: temperature must be positive");
  if (!(p.time >= 0.0)) fail("thermometry: interaction time must be >= 0");
  if (!(p.spectral_density > 0.0)) {
    fail("thermometry: spectral density must be positive");
  }
  if (!(p.energy > 0.0)) fail("thermometry: energy gap must be positive");
}

}  // namespace

Quaternion su2_quaternion(std::span<const double> theta) {
  check_theta(theta, 3, "su2");
  const double r =
      std::sqrt(theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2]);
  const double s = sinc(r);
  return Quaternion{{std::cos(r), s * theta[0], s * theta[1], s * theta[2]}};
}

Su2Element su2_unitary(std::span<const double> theta) {
  const Quaternion q = su2_quaternion(theta);
  CMatrix u(2, 2);
  // q0 1 - i (q1 X + q2 Y + q3 Z)
  u(0, 0) = cplx(q[0], -q[3]);
  u(0, 1) = cplx(-q[2], -q[1]);
  u(1, 0) = cplx(q[2], -q[1]);
  u(1, 1) = cplx(q[0], q[3]);
  return {u, q};
}

RVector su2_parameters(const Quaternion& q) {
  const double n = q.norm();
  const double q0 = std::clamp(q[0] / n, -1.0, 1.0);
  const double r = std::acos(q0);
  const double v = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) / n;
  RVector theta(3);
  if (v < 1e-15) {
    theta.setZero();
    return theta;
  }
  for (int i = 0; i < 3; ++i) theta(i) = r * q[static_cast<std::size_t>(i + 1)] / n / v;
  return theta;
}

std::vector<CMatrix> amplitude_damping_kraus(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail("amplitude damping: p must be in [0, 1]");
  CMatrix k1 = CMatrix::Zero(2, 2);
  CMatrix k2 = CMatrix::Zero(2, 2);
  k1(0, 0) = 1.0;
  k1(1, 1) = std::sqrt(1.0 - p);
  k2(0, 1) = std::sqrt(p);
  return {k1, k2};
}

CMatrix phase_unitary(double theta, double t) {
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = std::exp(-kI * theta * t / 2.0);
  u(1, 1) = std::exp(kI * theta * t / 2.0);
  return u;
}

double bose_occupation(double theta, double energy) {
  return 1.0 / std::expm1(energy / theta);
}

ChoiOperator thermometry_choi(double theta, const ThermometryParams& params) {
  check_thermo(theta, params);
  const double n = bose_occupation(theta, params.energy);
  const double rate = params.spectral_density * (2.0 * n + 1.0);
  const double gamma = std::exp(-rate * params.time);
  const double z = 2.0 * n + 1.0;
  CMatrix j = CMatrix::Zero(4, 4);
  // Index = in * 2 + out.
  j(0, 0) = (1.0 + n * (gamma + 1.0)) / z;
  j(1, 1) = n * (1.0 - gamma) / z;
  j(2, 2) = (n + 1.0) * (1.0 - gamma) / z;
  j(3, 3) = (n + gamma * (1.0 + n)) / z;
  j(0, 3) = std::sqrt(gamma);
  j(3, 0) = std::sqrt(gamma);
  return HermitianOperator(SystemLayout({{"I", 2}, {"O", 2}}), std::move(j));
}

std::vector<CMatrix> thermometry_kraus_from_occupation(
    double occupation, const ThermometryParams& params) {
  const double n = occupation;
  const double p = (n + 1.0) / (2.0 * n + 1.0);
  const double gamma =
      std::exp(-params.spectral_density * (2.0 * n + 1.0) * params.time);
  const double sp = std::sqrt(p);
  const double sq = std::sqrt(1.0 - p);
  const double sg = std::sqrt(gamma);
  const double sh = std::sqrt(1.0 - gamma);
  std::vector<CMatrix> k(4, CMatrix::Zero(2, 2));
  k[0](0, 0) = sp;
  k[0](1, 1) = sp * sg;
  k[1](0, 1) = sp * sh;
  k[2](0, 0) = sq * sg;
  k[2](1, 1) = sq;
  k[3](1, 0) = sq * sh;
  return k;
}

std::vector<CMatrix> thermometry_kraus(double theta,
                                       const ThermometryParams& params) {
  check_thermo(theta, params);
  return thermometry_kraus_from_occupation(
      bose_occupation(theta, params.energy), params);
}

ChoiOperator unitary_choi(const CMatrix& u) {
  const std::vector<CMatrix> k{u};
  return choi_from_kraus(k, "I", "O");
}

// ---------------------------------------------------------------------------
// ChannelModel

ChannelModel ChannelModel::identity(Index dim) {
  ChannelModel m;
  m.kind_ = ChannelKind::Identity;
  m.dim_ = dim;
  return m;
}

ChannelModel ChannelModel::su2() {
  ChannelModel m;
  m.kind_ = ChannelKind::Su2Unitary;
  return m;
}

ChannelModel ChannelModel::phase(double time) {
  ChannelModel m;
  m.kind_ = ChannelKind::PhaseUnitary;
  m.time_ = time;
  return m;
}

ChannelModel ChannelModel::amplitude_damping(double p) {
  amplitude_damping_kraus(p);  // validates
  ChannelModel m;
  m.kind_ = ChannelKind::AmplitudeDamping;
  m.damping_ = p;
  return m;
}

ChannelModel ChannelModel::thermometry(const ThermometryParams& params) {
  check_thermo(1.0, params);
  ChannelModel m;
  m.kind_ = ChannelKind::Thermometry;
  m.thermo_ = params;
  return m;
}

ChannelModel compose(const ChannelModel& noise, const ChannelModel& base) {
  if (noise.d_in() != base.d_out()) {
    fail("compose: inner output dimension " + std::to_string(base.d_out()) +
         " does not match outer input dimension " +
         std::to_string(noise.d_in()));
  }
  if (noise.param_dim() != 0 && base.param_dim() != 0) {
    fail("compose: only one of the two channels may carry parameters");
  }
  ChannelModel m;
  m.kind_ = ChannelKind::Composed;
  m.outer_ = std::make_shared<const ChannelModel>(noise);
  m.inner_ = std::make_shared<const ChannelModel>(base);
  return m;
}

int ChannelModel::param_dim() const {
  switch (kind_) {
    case ChannelKind::Identity:
    case ChannelKind::AmplitudeDamping:
      return 0;
    case ChannelKind::Su2Unitary:
      return 3;
    case ChannelKind::PhaseUnitary:
    case ChannelKind::Thermometry:
      return 1;
    case ChannelKind::Composed:
      return std::max(outer_->param_dim(), inner_->param_dim());
  }
  return 0;
}

Index ChannelModel::d_in() const {
  if (kind_ == ChannelKind::Composed) return inner_->d_in();
  return kind_ == ChannelKind::Identity ? dim_ : 2;
}

Index ChannelModel::d_out() const {
  if (kind_ == ChannelKind::Composed) return outer_->d_out();
  return kind_ == ChannelKind::Identity ? dim_ : 2;
}

std::vector<CMatrix> ChannelModel::kraus(std::span<const double> theta) const {
  switch (kind_) {
    case ChannelKind::Identity:
      return {CMatrix::Identity(dim_, dim_)};
    case ChannelKind::AmplitudeDamping:
      return amplitude_damping_kraus(damping_);
    case ChannelKind::Su2Unitary:
      return {su2_unitary(theta).unitary};
    case ChannelKind::PhaseUnitary:
      check_theta(theta, 1, "phase");
      return {phase_unitary(theta[0], time_)};
    case ChannelKind::Thermometry:
      check_theta(theta, 1, "thermometry");
      return thermometry_kraus(theta[0], thermo_);
    case ChannelKind::Composed: {
      const std::span<const double> none;
      const auto outer =
          outer_->kraus(outer_->param_dim() ? theta : none);
      const auto inner =
          inner_->kraus(inner_->param_dim() ? theta : none);
      std::vector<CMatrix> out;
      for (const auto& a : outer) {
        for (const auto& b : inner) out.push_back(a * b);
      }
      return out;
    }
  }
  return {};
}

ChoiOperator ChannelModel::choi(std::span<const double> theta) const {
  if (kind_ == ChannelKind::Thermometry) {
    check_theta(theta, 1, "thermometry");
    return thermometry_choi(theta[0], thermo_);
  }
  const auto k = kraus(theta);
  return choi_from_kraus(k, "I", "O");
}

ChoiOperator ChannelModel::cost_choi(std::span<const double> theta) const {
  if (kind_ == ChannelKind::Composed) {
    const std::span<const double> none;
    return inner_->param_dim() ? inner_->cost_choi(theta)
                               : outer_->cost_choi(outer_->param_dim() ? theta
                                                                      : none);
  }
  return choi(theta);
}

std::string ChannelModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ChannelKind::Identity:
      os << "identity(d=" << dim_ << ")";
      break;
    case ChannelKind::Su2Unitary:
      os << "su2";
      break;
    case ChannelKind::PhaseUnitary:
      os << "phase(t=" << time_ << ")";
      break;
    case ChannelKind::AmplitudeDamping:
      os << "amplitude_damping(p=" << damping_ << ")";
      break;
    case ChannelKind::Thermometry:
      os << "thermometry(energy=" << thermo_.energy
         << ", spectral_density=" << thermo_.spectral_density
         << ", t=" << thermo_.time << ")";
      break;
    case ChannelKind::Composed:
      os << outer_->describe() << " o " << inner_->describe();
      break;
  }
  return os.str();
}

}  // namespace bm
