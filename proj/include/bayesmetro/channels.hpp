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

// Parameter-encoding channel families.  All Choi operators live on the
// (I, O) layout, input first.

#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bayesmetro/operator.hpp"

namespace bm {

/// Unit quaternion q with U = q0 1 - i (q1 X + q2 Y + q3 Z).
struct Quaternion {
  std::array<double, 4> q{1.0, 0.0, 0.0, 0.0};

  double operator[](std::size_t i) const { return q[i]; }
  double dot(const Quaternion& o) const {
    return q[0] * o.q[0] + q[1] * o.q[1] + q[2] * o.q[2] + q[3] * o.q[3];
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Eigen::Vector4d vector() const { return {q[0], q[1], q[2], q[3]}; }
};

struct Su2Element {
  CMatrix unitary;
  Quaternion quaternion;
};

/// U = exp(-i theta . sigma) = cos r 1 - i sin r (theta/r) . sigma.
Su2Element su2_unitary(std::span<const double> theta);
Quaternion su2_quaternion(std::span<const double> theta);

/// Inverse of su2_quaternion into the closed ball r <= pi.
RVector su2_parameters(const Quaternion& q);

std::vector<CMatrix> amplitude_damping_kraus(double p);

/// diag(e^{-i theta t / 2}, e^{i theta t / 2}).
CMatrix phase_unitary(double theta, double t);

/// Bath and interaction settings for the qubit thermometry channel.  Energies
/// and rates are in units of the probe gap (energy = 1, spectral = 1 by
/// default), so temperatures are theta / epsilon.
struct ThermometryParams {
  double energy = 1.0;
  double spectral_density = 1.0;
  double time = 1.0;
};

/// Thermal occupation N_B = 1 / (e^{energy/theta} - 1).
double bose_occupation(double theta, double energy);

/// Closed-form Choi matrix of the thermalizing qubit channel in (I, O) order
/// with |0> the ground state.
ChoiOperator thermometry_choi(double theta, const ThermometryParams& params);

/// Canonical four-element Kraus set with p = (N+1)/(2N+1) and
/// gamma = exp(-(Gamma_in + Gamma_out) t).
std::vector<CMatrix> thermometry_kraus(double theta,
                                       const ThermometryParams& params);

/// Same Kraus family written directly in terms of the occupation number.
std::vector<CMatrix> thermometry_kraus_from_occupation(
    double occupation, const ThermometryParams& params);

ChoiOperator unitary_choi(const CMatrix& u);

enum class ChannelKind {
  Identity,
  Su2Unitary,
  PhaseUnitary,
  AmplitudeDamping,
  Thermometry,
  Composed,
};

/// Immutable description of a (possibly parameter-dependent) qubit channel.
/// `choi` is the probability kernel J_theta; `cost_choi` is the Choi of the
/// noiseless unitary part (identical to `choi` for non-composed families).
class ChannelModel {
 public:
  static ChannelModel identity(Index dim = 2);
  static ChannelModel su2();
  static ChannelModel phase(double time);
  static ChannelModel amplitude_damping(double p);
  static ChannelModel thermometry(const ThermometryParams& params);

  /// noise o base, Kraus {N_a B_b(theta)}.
  friend ChannelModel compose(const ChannelModel& noise,
                              const ChannelModel& base);

  ChannelKind kind() const { return kind_; }
  int param_dim() const;
  Index d_in() const;
  Index d_out() const;

  std::vector<CMatrix> kraus(std::span<const double> theta) const;
  ChoiOperator choi(std::span<const double> theta) const;
  ChoiOperator cost_choi(std::span<const double> theta) const;

  std::string describe() const;

 private:
  ChannelKind kind_ = ChannelKind::Identity;
  Index dim_ = 2;
  double damping_ = 0.0;
  double time_ = 1.0;
  ThermometryParams thermo_{};
  std::shared_ptr<const ChannelModel> outer_;
  std::shared_ptr<const ChannelModel> inner_;
};

ChannelModel compose(const ChannelModel& noise, const ChannelModel& base);

}  // namespace bm
