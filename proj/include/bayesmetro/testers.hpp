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

// Strategy classes, tester constraints and the tester SDP.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bayesmetro/operator.hpp"
#include "bayesmetro/sdp.hpp"

namespace bm {

enum class StrategyKind { Parallel, Sequential, General };

const char* to_string(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name);

struct StrategyClass {
  StrategyKind kind = StrategyKind::Parallel;
  int copies = 1;

  bool operator==(const StrategyClass&) const = default;
};

/// N_O PSD elements on I1 O1 ... Ik Ok plus the class they were solved in.
class TesterSet {
 public:
  TesterSet() = default;
  TesterSet(std::vector<HermitianOperator> elements, StrategyClass strategy);

  std::size_t size() const { return elements_.size(); }
  const HermitianOperator& operator[](std::size_t i) const {
    return elements_[i];
  }
  const std::vector<HermitianOperator>& elements() const { return elements_; }
  const StrategyClass& strategy() const { return strategy_; }
  const SystemLayout& layout() const { return elements_.at(0).layout(); }

  /// W = sum_i T_i.
  HermitianOperator sum() const;

  /// Columns vec(T_i), for batched probability evaluation.
  CMatrix vectorized() const;

 private:
  std::vector<HermitianOperator> elements_;
  StrategyClass strategy_;
};

/// A signed sum of trace-and-replace maps; an empty label list stands for
/// the identity map.
struct ReplaceTerm {
  double coeff = 1.0;
  std::vector<std::string> labels;
};
using ReplaceCombination = std::vector<ReplaceTerm>;

/// Feasible W: Tr W = trace_value and every combination maps W to zero.
struct AffineConstraints {
  SystemLayout layout;
  double trace_value = 1.0;
  std::vector<ReplaceCombination> kernels;
};

HermitianOperator apply_combination(const ReplaceCombination& combo,
                                    const HermitianOperator& w);

AffineConstraints constraints_parallel(int k, Index d_in, Index d_out);
AffineConstraints constraints_sequential(int k, Index d_in, Index d_out);
AffineConstraints constraints_general_k2(Index d_in, Index d_out);
AffineConstraints constraints_for(const StrategyClass& strategy, Index d_in,
                                  Index d_out);

/// Largest Frobenius norm among the kernel images and |Tr W - value|.
double constraint_residual(const AffineConstraints& c,
                           const HermitianOperator& w);

/// Sparse Hermitian spanning set (columns vec(A_p)) of the orthogonal
/// complement of the feasible linear subspace: images of the Hermitian unit
/// basis under the kernel maps, sparsest first, keeping a linearly
/// independent subset.  Results are memoized per (layout, constraint set).
const CMatrix& complement_basis(const AffineConstraints& c);

/// C_i = sum_j p_j c(theta_j, est_i) J_j^{(x)k}, given the N_H x N_O cost
/// table and the cached vectorized powers (D^2 x N_H).
std::vector<CMatrix> build_objective(const CMatrix& powers,
                                     const RVector& weights,
                                     const RMatrix& cost_table, Index dim);

struct SdpDiagnostics {
  sdp::Status status = sdp::Status::NumericalFailure;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Index constraints = 0;
};

struct TesterSolution {
  TesterSet testers;
  double value = 0.0;
  SdpDiagnostics diagnostics;
};

struct SolveSettings {
  double tolerance = 1e-8;
  int max_iterations = 100;
  sdp::Backend backend = sdp::Backend::Complex;
};

/// Assembles the tester SDP (one PSD block per outcome, the sum constrained
/// by `constraints`).
sdp::Problem<cplx> assemble_tester_problem(const AffineConstraints& constraints,
                                           const std::vector<CMatrix>& objective,
                                           sdp::Sense sense);

/// Solves the tester SDP.  Throws Error(Solver) for infeasible, unbounded
/// or numerically failed solves; a degraded solve is returned with its
/// status and a warning.
TesterSolution solve_testers(const StrategyClass& strategy, Index d_in,
                             Index d_out, const std::vector<CMatrix>& objective,
                             sdp::Sense sense,
                             const SolveSettings& settings = {});

}  // namespace bm
