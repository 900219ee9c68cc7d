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

// Dense Hermitian operators on labeled tensor-product spaces.
//
// Every operator carries a SystemLayout: an ordered list of (label, dim)
// factors.  The canonical multi-copy ordering is I1, O1, I2, O2, ...; basis
// index digits are big-endian in that order (first factor most significant),
// matching Eigen's Kronecker convention.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bayesmetro/common.hpp"

namespace bm {

struct Factor {
  std::string label;
  Index dim = 1;

  bool operator==(const Factor&) const = default;
};

class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<Factor> factors);
  SystemLayout(std::initializer_list<Factor> factors)
      : SystemLayout(std::vector<Factor>(factors)) {}

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  Index total_dim() const { return total_; }

  bool contains(std::string_view label) const;
  std::size_t position(std::string_view label) const;
  Index dim(std::string_view label) const;
  std::vector<std::string> labels() const;

  /// Concatenation; throws on label collision.
  SystemLayout concat(const SystemLayout& other) const;
  SystemLayout without(std::span<const std::string> labels) const;
  SystemLayout relabeled(std::string_view from, std::string_view to) const;

  std::string to_string() const;

  bool operator==(const SystemLayout& other) const {
    return factors_ == other.factors_;
  }

 private:
  std::vector<Factor> factors_;
  Index total_ = 1;
};

/// Canonical layout I1,O1,...,Ik,Ok for k uses of a d_in -> d_out channel.
SystemLayout copies_layout(int k, Index d_in, Index d_out);

class HermitianOperator {
 public:
  HermitianOperator() = default;

  /// Validates size and Hermiticity (max|A - A^H| <= 1e-12 max|A|).
  HermitianOperator(SystemLayout layout, CMatrix entries);

  /// Symmetrizes (A + A^H)/2 instead of rejecting; warns if the drift
  /// exceeds 1e-10 relative.  Used after floating-point heavy operations.
  static HermitianOperator symmetrized(SystemLayout layout, CMatrix entries);

  static HermitianOperator identity(SystemLayout layout);
  static HermitianOperator zero(SystemLayout layout);

  const SystemLayout& layout() const { return layout_; }
  const CMatrix& matrix() const { return entries_; }
  Index dim() const { return entries_.rows(); }

  cplx operator()(Index r, Index c) const { return entries_(r, c); }
  double trace() const { return entries_.trace().real(); }
  double min_eigenvalue() const;

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double s) const;

 private:
  SystemLayout layout_;
  CMatrix entries_;
};

using ChoiOperator = HermitianOperator;

/// Re Tr(A B) for operators on identical layouts.
double inner(const HermitianOperator& a, const HermitianOperator& b);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
/// k-fold tensor power; factor label L of copy c (1-based) becomes L + c,
/// so a Choi on (I, O) yields the canonical I1, O1, ..., Ik, Ok layout.
HermitianOperator kron_copies(const HermitianOperator& a, int k);

HermitianOperator partial_trace(const HermitianOperator& a,
                                std::span<const std::string> labels);
HermitianOperator partial_transpose(const HermitianOperator& a,
                                    std::span<const std::string> labels);

/// Tr_X[A] (x) 1_X / d_X with the original factor order preserved.
HermitianOperator trace_and_replace(const HermitianOperator& a,
                                    std::span<const std::string> labels);

/// Reorders tensor factors; `order` lists every label exactly once.
HermitianOperator permute(const HermitianOperator& a,
                          std::span<const std::string> order);

/// Column-major vectorization (the Vec map whose outer product with itself
/// gives a Choi operator in input-first order).
CVector vec(const CMatrix& m);

/// J = sum_a Vec(K_a) Vec(K_a)^H on (in_label, out_label); Kraus matrices
/// are d_out x d_in and must satisfy sum K^H K = 1 within 1e-10.
ChoiOperator choi_from_kraus(std::span<const CMatrix> kraus,
                             const std::string& in_label,
                             const std::string& out_label);

/// Action of a channel given by its Choi operator on a state:
/// Tr_in[(rho^{T_in} (x) 1_out)(1_rest (x) J)].  The input factors of `choi`
/// must match the labels/dims of `state`; outputs are appended at the end.
HermitianOperator apply_choi(const HermitianOperator& state,
                             const HermitianOperator& choi,
                             std::span<const std::string> in_labels);

/// Embeds `a` into `target` (a superset layout) by tensoring identities on
/// the missing factors and reordering.
HermitianOperator extend_to(const HermitianOperator& a,
                            const SystemLayout& target);

namespace detail {
/// For each basis index of `layout`, the contribution of the factors named
/// in `labels` to that index (sum of digit * stride over those factors).
std::vector<Index> sub_offsets(const SystemLayout& layout,
                               std::span<const std::string> labels);
}  // namespace detail

}  // namespace bm
