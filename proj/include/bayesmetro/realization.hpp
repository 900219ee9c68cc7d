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

// Physical implementations (states, channels, measurements) of testers.
//
// Conventions.  A channel always acts on the "I" factor of the state handed
// to it and |Omega> = sum_i |ii>.  Auxiliary systems are copies of the
// factors they purify:
//
//   parallel     rho on I(1..k) (x) A,   A = I(1..k)
//                M_i on A (x) O(1..k)
//   sequential   rho on I1 (x) A1,       A1 = I1
//                Phi: A1 O1 -> I2 A2,    A2 = I1 O1 I2  (Choi, input first)
//                M_i on A2 (x) O2
//
// With these orderings the POVM elements are M_i = (S^+ (x) 1) T_i (S^+ (x) 1)
// with S = sqrt(sigma) (parallel) or sqrt(E) (sequential), no transposes.

#pragma once

#include <iosfwd>
#include <vector>

#include "bayesmetro/testers.hpp"

namespace bm {

/// Pseudo inverse square root data of a PSD matrix with eigenvalue floor.
struct PsdRoots {
  CMatrix sqrt;
  CMatrix pinv_sqrt;
  /// Projector onto the eigenvalues above the floor.
  CMatrix support;
  Index rank = 0;
};
PsdRoots psd_roots(const CMatrix& a, double floor = 1e-10);

struct ParallelRealization {
  int copies = 1;
  Index d_in = 2;
  Index d_out = 2;
  /// sigma on I(1..k), unit trace.
  CMatrix sigma;
  /// Probe on I(1..k) (x) A.
  CMatrix rho;
  /// POVM on A (x) O(1..k).
  std::vector<CMatrix> povm;
  Index sigma_rank = 0;
};

struct SequentialRealization {
  Index d_in = 2;
  Index d_out = 2;
  CMatrix sigma;  // on I1
  CMatrix e;      // on I1 O1 I2
  CMatrix rho;    // on I1 (x) A1
  CMatrix phi;    // Choi on A1 O1 I2 A2
  std::vector<CMatrix> povm;  // on A2 (x) O2
  Index sigma_rank = 0;
  Index e_rank = 0;
};

struct GeneralRealization {
  Index dim = 0;        // D of the tester space
  Index outcomes = 0;   // pointer dimension
  /// Block diagonal sum_i T_i (x) |i><i| on (I1 O1 I2 O2) (x) P.
  CMatrix process;
};

ParallelRealization realize_parallel(const TesterSet& t);
SequentialRealization realize_sequential_k2(const TesterSet& t);
GeneralRealization realize_general(const TesterSet& t);

/// Simulates the physical protocol with the channel's Kraus operators and
/// returns p(i | theta) for every outcome.
RVector realized_probabilities(const ParallelRealization& r,
                               const std::vector<CMatrix>& kraus);
RVector realized_probabilities(const SequentialRealization& r,
                               const std::vector<CMatrix>& kraus);
RVector realized_probabilities(const GeneralRealization& r,
                               const CMatrix& channel_power);

/// Largest deviation of sum_i M_i from the identity and most negative POVM
/// eigenvalue.
struct RealizationChecks {
  double povm_normalization = 0.0;
  double povm_min_eigenvalue = 0.0;
  double rho_trace_error = 0.0;
  double rho_min_eigenvalue = 0.0;
  double phi_trace_preservation = 0.0;  // sequential only
  double phi_min_eigenvalue = 0.0;      // sequential only
};
RealizationChecks check(const ParallelRealization& r);
RealizationChecks check(const SequentialRealization& r);

/// JSON bundle; matrices are {"rows", "cols", "data": [[re, im], ...]}
/// in row-major order.
void write_realization_json(std::ostream& os, const ParallelRealization& r);
void write_realization_json(std::ostream& os, const SequentialRealization& r);
void write_realization_json(std::ostream& os, const GeneralRealization& r);

}  // namespace bm
