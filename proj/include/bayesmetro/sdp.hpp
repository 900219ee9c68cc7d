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

// Primal-dual interior point solver for block semidefinite programs
//
//   max/min  sum_b Re Tr(C_b X_b)
//   s.t.     sum_b Re Tr(A_{b,p} X_b) = b_p,   X_b >= 0.
//
// Blocks are grouped by a shared constraint "template": every block that
// references template t uses the same A_p matrices (as happens for the N_O
// tester elements, which only enter the constraints through their sum).
// The scalar type is either std::complex<double> (Hermitian blocks) or
// double (real symmetric blocks).  Hermitian problems can also be lowered to
// real ones through the [[Re, -Im], [Im, Re]] embedding.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bayesmetro/common.hpp"

namespace bm::sdp {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Sense { Maximize, Minimize };

enum class Status {
  Optimal,
  /// Iteration limit or stall with residuals above tolerance; the iterate is
  /// still returned.
  Degraded,
  PrimalInfeasible,
  DualInfeasible,
  NumericalFailure,
};

const char* to_string(Status s);

enum class Backend { Complex, RealEmbedding };

template <class Scalar>
struct Problem {
  /// Per-block cost matrices (Hermitian / symmetric).
  std::vector<Mat<Scalar>> cost;
  /// Template t: columns vec(A_p), column-major, one per constraint.
  std::vector<Mat<Scalar>> templates;
  /// Template index used by each block.
  std::vector<std::size_t> block_template;
  RVector rhs;
  Sense sense = Sense::Maximize;

  std::size_t blocks() const { return cost.size(); }
  Index constraints() const { return rhs.size(); }
  void validate() const;
};

struct Options {
  double tolerance = 1e-8;
  int max_iterations = 100;
  /// Fraction of the distance to the boundary taken per step.
  double step_fraction = 0.95;
};

template <class Scalar>
struct Solution {
  std::vector<Mat<Scalar>> primal;
  std::vector<Mat<Scalar>> slack;
  RVector dual;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  Status status = Status::NumericalFailure;
};

template <class Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options& options);

extern template Solution<double> solve(const Problem<double>&, const Options&);
extern template Solution<cplx> solve(const Problem<cplx>&, const Options&);

/// Real symmetric 2n x 2n embedding of a Hermitian n x n matrix.
RMatrix embed(const CMatrix& h);
/// Inverse of `embed` for matrices in its range (averages the redundant
/// copies, so it is also the orthogonal projection back).
CMatrix unembed(const RMatrix& r);

Problem<double> lower_to_real(const Problem<cplx>& problem);
Solution<cplx> lift_from_real(const Solution<double>& real);

/// Hermitian solve through the chosen backend.
Solution<cplx> solve_hermitian(const Problem<cplx>& problem,
                               const Options& options,
                               Backend backend = Backend::Complex);

/// Text dump for cross-solver debugging.  Format:
///   header lines "sense", "blocks <n> <dim_0> ...", "constraints <m>",
///   then "rhs <p> <value>" lines, "C <block> <row> <col> <re> <im>"
///   lines and "A <template> <p> <row> <col> <re> <im>" lines (upper
///   triangle, nonzeros only), then "map <block> <template>" lines.
void write_triplets(std::ostream& os, const Problem<cplx>& problem);

}  // namespace bm::sdp
