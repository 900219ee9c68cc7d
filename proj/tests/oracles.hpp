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

// Independent reference computations for the unit tests.  Everything here
// works on raw index arithmetic and dense linear algebra, without touching
// the library's tensor machinery.

#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bayesmetro/common.hpp"

namespace oracle {

using bm::cplx;
using bm::CMatrix;
using bm::Index;
using bm::RMatrix;
using bm::RVector;

inline CMatrix random_matrix(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> n;
  CMatrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, Index d) {
  const CMatrix a = random_matrix(rng, d, d);
  return (a + a.adjoint()) / 2.0;
}

/// Ginibre-induced random density matrix.
inline CMatrix random_state(std::mt19937_64& rng, Index d) {
  const CMatrix g = random_matrix(rng, d, d);
  CMatrix r = g * g.adjoint();
  return r / r.trace().real();
}

/// Kraus set of a random channel from a random isometry d_in -> d_out * n.
inline std::vector<CMatrix> random_kraus(std::mt19937_64& rng, Index d_in, Index d_out,
                                         int n) {
  const CMatrix g = random_matrix(rng, d_out * n, d_in);
  Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix v = qr.householderQ() * CMatrix::Identity(d_out * n, d_in);
  std::vector<CMatrix> k;
  for (int a = 0; a < n; ++a) k.push_back(v.block(a * d_out, 0, d_out, d_in));
  return k;
}

/// Digits of a basis index for big-endian factor dims.
inline std::vector<Index> digits(Index idx, const std::vector<Index>& dims) {
  std::vector<Index> d(dims.size());
  for (std::size_t f = dims.size(); f-- > 0;) {
    d[f] = idx % dims[f];
    idx /= dims[f];
  }
  return d;
}

inline Index index_of(const std::vector<Index>& d, const std::vector<Index>& dims) {
  Index idx = 0;
  for (std::size_t f = 0; f < dims.size(); ++f) idx = idx * dims[f] + d[f];
  return idx;
}

/// Partial trace over the factors flagged in `traced`, by explicit loops.
inline CMatrix partial_trace(const CMatrix& a, const std::vector<Index>& dims,
                             const std::vector<bool>& traced) {
  std::vector<Index> kept;
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (!traced[f]) kept.push_back(dims[f]);
  Index dk = 1;
  for (Index d : kept) dk *= d;
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Index r = 0; r < a.rows(); ++r) {
    const auto dr = digits(r, dims);
    for (Index c = 0; c < a.cols(); ++c) {
      const auto dc = digits(c, dims);
      bool diag = true;
      std::vector<Index> kr, kc;
      for (std::size_t f = 0; f < dims.size(); ++f) {
        if (traced[f]) {
          if (dr[f] != dc[f]) diag = false;
        } else {
          kr.push_back(dr[f]);
          kc.push_back(dc[f]);
        }
      }
      if (diag) out(index_of(kr, kept), index_of(kc, kept)) += a(r, c);
    }
  }
  return out;
}

/// Choi operator in input-first order: sum_ij |i><j| (x) E(|i><j|).
inline CMatrix choi(const std::vector<CMatrix>& kraus) {
  const Index din = kraus[0].cols(), dout = kraus[0].rows();
  CMatrix j = CMatrix::Zero(din * dout, din * dout);
  for (Index a = 0; a < din; ++a)
    for (Index b = 0; b < din; ++b) {
      CMatrix e = CMatrix::Zero(din, din);
      e(a, b) = 1.0;
      CMatrix out = CMatrix::Zero(dout, dout);
      for (const auto& k : kraus) out += k * e * k.adjoint();
      j.block(a * dout, b * dout, dout, dout) = out;
    }
  return j;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double trace_norm(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  return es.eigenvalues().cwiseAbs().sum();
}

inline double min_eig(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((h + h.adjoint()) / 2.0);
  return es.eigenvalues()(0);
}

inline double max_eig(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((h + h.adjoint()) / 2.0);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

/// Composite Simpson rule on [a, b] with n (even) intervals.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace oracle
