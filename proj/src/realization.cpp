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

#include "bayesmetro/realization.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

namespace bm {

namespace {

constexpr double kResidualLimit = 1e-6;

std::vector<std::string> labels(char prefix, int k) {
  std::vector<std::string> out;
  for (int c = 1; c <= k; ++c) out.push_back(prefix + std::to_string(c));
  return out;
}

void require_class(const TesterSet& t, StrategyKind kind, const char* what) {
  if (t.size() == 0) fail("empty tester set");
  if (t.strategy().kind != kind) {
    fail(std::string(what) + " realization needs a " + to_string(kind) +
         " tester, got " + to_string(t.strategy().kind));
  }
}

Index factor_dim(const SystemLayout& l, const char* label) {
  return l.dim(label);
}

/// X on (P, Q) -> the same operator on (Q, P).
CMatrix swap_factors(const CMatrix& x, Index p, Index q) {
  CMatrix y(p * q, p * q);
  for (Index a = 0; a < p; ++a)
    for (Index b = 0; b < q; ++b)
      for (Index c = 0; c < p; ++c)
        for (Index d = 0; d < q; ++d)
          y(b * p + a, d * p + c) = x(a * q + b, c * q + d);
  return y;
}

/// Sum_K (K (x) 1) x (K (x) 1)^H with K acting on the leading factor.
CMatrix apply_leading(const std::vector<CMatrix>& kraus, const CMatrix& x,
                      Index rest) {
  CMatrix out;
  for (const auto& k : kraus) {
    const CMatrix big =
        Eigen::kroneckerProduct(k, CMatrix::Identity(rest, rest)).eval();
    const CMatrix term = big * x * big.adjoint();
    if (out.size() == 0) {
      out = term;
    } else {
      out += term;
    }
  }
  return out;
}

/// Kraus operators of k parallel uses.
std::vector<CMatrix> kraus_power(const std::vector<CMatrix>& kraus, int k) {
  std::vector<CMatrix> out{CMatrix::Identity(1, 1)};
  for (int c = 0; c < k; ++c) {
    std::vector<CMatrix> next;
    for (const auto& a : out)
      for (const auto& b : kraus) next.push_back(Eigen::kroneckerProduct(a, b).eval());
    out = std::move(next);
  }
  return out;
}

/// (1 (x) s)|Omega>: entry a + i d holds s(a, i).
CVector purification(const CMatrix& s) {
  const Index d = s.rows();
  CVector psi(d * d);
  for (Index i = 0; i < d; ++i)
    for (Index a = 0; a < d; ++a) psi(i * d + a) = s(a, i);
  return psi;
}

double min_eig(const CMatrix& m) {
  const CMatrix h = (m + m.adjoint()) / 2.0;
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

nlohmann::json matrix_json(const CMatrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      data.push_back({m(r, c).real(), m(r, c).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

nlohmann::json povm_json(const std::vector<CMatrix>& povm) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& m : povm) a.push_back(matrix_json(m));
  return a;
}

double povm_norm_error(const std::vector<CMatrix>& povm) {
  CMatrix s = CMatrix::Zero(povm[0].rows(), povm[0].cols());
  for (const auto& m : povm) s += m;
  return (s - CMatrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

double povm_min_eig(const std::vector<CMatrix>& povm) {
  double lo = 0.0;
  for (const auto& m : povm) lo = std::min(lo, min_eig(m));
  return lo;
}

}  // namespace

PsdRoots psd_roots(const CMatrix& a, double floor) {
  const CMatrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const RVector ev = es.eigenvalues();
  const CMatrix& v = es.eigenvectors();
  RVector s = RVector::Zero(ev.size());
  RVector si = RVector::Zero(ev.size());
  RVector pr = RVector::Zero(ev.size());
  PsdRoots out;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > floor) {
      s(i) = std::sqrt(ev(i));
      si(i) = 1.0 / s(i);
      pr(i) = 1.0;
      ++out.rank;
    }
  }
  out.sqrt = v * s.cast<cplx>().asDiagonal() * v.adjoint();
  out.pinv_sqrt = v * si.cast<cplx>().asDiagonal() * v.adjoint();
  out.support = v * pr.cast<cplx>().asDiagonal() * v.adjoint();
  return out;
}

ParallelRealization realize_parallel(const TesterSet& t) {
  require_class(t, StrategyKind::Parallel, "parallel");
  const int k = t.strategy().copies;
  const SystemLayout& layout = t.layout();
  ParallelRealization r;
  r.copies = k;
  r.d_in = factor_dim(layout, "I1");
  r.d_out = factor_dim(layout, "O1");
  const auto ins = labels('I', k);
  const auto outs = labels('O', k);
  std::vector<std::string> order = ins;
  order.insert(order.end(), outs.begin(), outs.end());

  std::vector<HermitianOperator> grouped;
  for (const auto& e : t.elements()) grouped.push_back(permute(e, order));
  HermitianOperator w = grouped[0];
  for (std::size_t i = 1; i < grouped.size(); ++i) w = w + grouped[i];

  const Index din = static_cast<Index>(std::llround(std::pow(r.d_in, k)));
  const Index dout = static_cast<Index>(std::llround(std::pow(r.d_out, k)));
  r.sigma = partial_trace(w, outs).matrix() / static_cast<double>(dout);
  const CMatrix expect =
      Eigen::kroneckerProduct(r.sigma, CMatrix::Identity(dout, dout)).eval();
  const double resid = (w.matrix() - expect).cwiseAbs().maxCoeff();
  if (resid > kResidualLimit) {
    fail("parallel realization: sum of tester elements deviates from "
         "sigma (x) 1 by " + std::to_string(resid));
  }
  const PsdRoots roots = psd_roots(r.sigma);
  r.sigma_rank = roots.rank;
  const CVector psi = purification(roots.sqrt);
  r.rho = psi * psi.adjoint();

  const CMatrix left =
      Eigen::kroneckerProduct(roots.pinv_sqrt, CMatrix::Identity(dout, dout)).eval();
  for (const auto& g : grouped) r.povm.push_back(left * g.matrix() * left);
  const CMatrix kernel = CMatrix::Identity(din, din) - roots.support;
  r.povm[0] += Eigen::kroneckerProduct(kernel, CMatrix::Identity(dout, dout)).eval();
  return r;
}

SequentialRealization realize_sequential_k2(const TesterSet& t) {
  require_class(t, StrategyKind::Sequential, "sequential");
  if (t.strategy().copies != 2) {
    fail("sequential realization is implemented for k = 2 only");
  }
  const SystemLayout& layout = t.layout();
  SequentialRealization r;
  const Index di = r.d_in = factor_dim(layout, "I1");
  const Index dout = r.d_out = factor_dim(layout, "O1");
  const HermitianOperator w = t.sum();

  const std::vector<std::string> o2{"O2"};
  const std::vector<std::string> rest{"O1", "I2", "O2"};
  r.e = partial_trace(w, o2).matrix() / static_cast<double>(dout);
  r.sigma = partial_trace(w, rest).matrix() / static_cast<double>(dout * dout);

  double resid =
      (w.matrix() -
       Eigen::kroneckerProduct(r.e, CMatrix::Identity(dout, dout)).eval())
          .cwiseAbs()
          .maxCoeff();
  const HermitianOperator e_op = HermitianOperator::symmetrized(
      SystemLayout{{"I1", di}, {"O1", dout}, {"I2", di}}, r.e);
  const std::vector<std::string> i2{"I2"};
  const CMatrix e_marg = partial_trace(e_op, i2).matrix();
  resid = std::max(
      resid, (e_marg - Eigen::kroneckerProduct(r.sigma, CMatrix::Identity(dout, dout))
                           .eval())
                 .cwiseAbs()
                 .maxCoeff());
  if (resid > kResidualLimit) {
    fail("sequential realization: comb conditions violated by " +
         std::to_string(resid));
  }

  const PsdRoots rs = psd_roots(r.sigma);
  const PsdRoots re = psd_roots(r.e);
  r.sigma_rank = rs.rank;
  r.e_rank = re.rank;

  const CVector psi = purification(rs.sqrt);
  r.rho = psi * psi.adjoint();

  // Kraus operator of Phi: |alpha, o> -> (1 (x) sqrt E) sum_c
  // |c> (x) sigma^{-1/2}|alpha> (x) |o> (x) |c>, output order I2 A2.
  const Index d_a2 = di * dout * di;
  const Index n_in = di * dout;
  const Index n_out = di * d_a2;
  CMatrix g = CMatrix::Zero(n_out, n_in);
  for (Index c = 0; c < di; ++c)
    for (Index a = 0; a < di; ++a)
      for (Index o = 0; o < dout; ++o)
        for (Index alpha = 0; alpha < di; ++alpha) {
          const Index row = ((c * di + a) * dout + o) * di + c;
          g(row, alpha * dout + o) += rs.pinv_sqrt(a, alpha);
        }
  const CMatrix b =
      Eigen::kroneckerProduct(CMatrix::Identity(di, di), re.sqrt).eval() * g;
  CVector v(n_in * n_out);
  for (Index col = 0; col < n_in; ++col)
    for (Index row = 0; row < n_out; ++row) v(col * n_out + row) = b(row, col);
  r.phi = v * v.adjoint();
  // Inputs outside the support of sigma are never populated; send them to
  // |0><0| so Phi is trace preserving.
  const CMatrix q = CMatrix::Identity(di, di) - rs.support;
  const CMatrix qin =
      Eigen::kroneckerProduct(q, CMatrix::Identity(dout, dout)).eval().transpose();
  CMatrix zero = CMatrix::Zero(n_out, n_out);
  zero(0, 0) = 1.0;
  r.phi += Eigen::kroneckerProduct(qin, zero).eval();

  const CMatrix left =
      Eigen::kroneckerProduct(re.pinv_sqrt, CMatrix::Identity(dout, dout)).eval();
  for (const auto& ti : t.elements()) r.povm.push_back(left * ti.matrix() * left);
  const CMatrix kernel = CMatrix::Identity(d_a2, d_a2) - re.support;
  r.povm[0] += Eigen::kroneckerProduct(kernel, CMatrix::Identity(dout, dout)).eval();
  return r;
}

GeneralRealization realize_general(const TesterSet& t) {
  require_class(t, StrategyKind::General, "general");
  GeneralRealization r;
  r.dim = t.layout().total_dim();
  r.outcomes = static_cast<Index>(t.size());
  const Index n = r.outcomes;
  r.process = CMatrix::Zero(r.dim * n, r.dim * n);
  for (Index i = 0; i < n; ++i) {
    const CMatrix& ti = t[static_cast<std::size_t>(i)].matrix();
    for (Index x = 0; x < r.dim; ++x)
      for (Index y = 0; y < r.dim; ++y) r.process(x * n + i, y * n + i) = ti(x, y);
  }
  return r;
}

RVector realized_probabilities(const ParallelRealization& r,
                               const std::vector<CMatrix>& kraus) {
  const Index din = r.sigma.rows();
  const auto kp = kraus_power(kraus, r.copies);
  const Index dout = kp.at(0).rows();
  // rho on (I, A) -> (O, A) -> (A, O).
  const CMatrix out = swap_factors(apply_leading(kp, r.rho, din), dout, din);
  RVector p(static_cast<Index>(r.povm.size()));
  for (std::size_t i = 0; i < r.povm.size(); ++i) {
    p(static_cast<Index>(i)) = (r.povm[i] * out).trace().real();
  }
  return p;
}

RVector realized_probabilities(const SequentialRealization& r,
                               const std::vector<CMatrix>& kraus) {
  const Index di = r.d_in;
  const Index dout = r.d_out;
  const Index n_in = di * dout;
  const Index d_a2 = di * dout * di;
  const Index n_out = di * d_a2;
  // First use: rho on (I1, A1) -> (O1, A1) -> (A1, O1).
  const CMatrix x = swap_factors(apply_leading(kraus, r.rho, di), dout, di);
  // Phi from its Choi matrix: Phi(X) = Tr_in[(X^T (x) 1) Phi].
  CMatrix tau = CMatrix::Zero(n_out, n_out);
  for (Index a = 0; a < n_in; ++a)
    for (Index b = 0; b < n_in; ++b)
      tau += x(a, b) * r.phi.block(a * n_out, b * n_out, n_out, n_out);
  // Second use on I2: (I2, A2) -> (O2, A2) -> (A2, O2).
  const CMatrix omega = swap_factors(apply_leading(kraus, tau, d_a2), dout, d_a2);
  RVector p(static_cast<Index>(r.povm.size()));
  for (std::size_t i = 0; i < r.povm.size(); ++i) {
    p(static_cast<Index>(i)) = (r.povm[i] * omega).trace().real();
  }
  return p;
}

RVector realized_probabilities(const GeneralRealization& r,
                               const CMatrix& channel_power) {
  if (channel_power.rows() != r.dim) {
    fail("channel power dimension does not match the process matrix");
  }
  const Index n = r.outcomes;
  RVector p(n);
  for (Index i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (Index x = 0; x < r.dim; ++x)
      for (Index y = 0; y < r.dim; ++y)
        acc += r.process(x * n + i, y * n + i) * channel_power(y, x);
    p(i) = acc.real();
  }
  return p;
}

RealizationChecks check(const ParallelRealization& r) {
  RealizationChecks c;
  c.povm_normalization = povm_norm_error(r.povm);
  c.povm_min_eigenvalue = povm_min_eig(r.povm);
  c.rho_trace_error = std::abs(r.rho.trace().real() - 1.0);
  c.rho_min_eigenvalue = min_eig(r.rho);
  return c;
}

RealizationChecks check(const SequentialRealization& r) {
  RealizationChecks c;
  c.povm_normalization = povm_norm_error(r.povm);
  c.povm_min_eigenvalue = povm_min_eig(r.povm);
  c.rho_trace_error = std::abs(r.rho.trace().real() - 1.0);
  c.rho_min_eigenvalue = min_eig(r.rho);
  const Index n_in = r.d_in * r.d_out;
  const Index n_out = r.phi.rows() / n_in;
  CMatrix marg(n_in, n_in);
  for (Index a = 0; a < n_in; ++a)
    for (Index b = 0; b < n_in; ++b)
      marg(a, b) = r.phi.block(a * n_out, b * n_out, n_out, n_out).trace();
  c.phi_trace_preservation =
      (marg - CMatrix::Identity(n_in, n_in)).cwiseAbs().maxCoeff();
  c.phi_min_eigenvalue = min_eig(r.phi);
  return c;
}

void write_realization_json(std::ostream& os, const ParallelRealization& r) {
  nlohmann::json j = {
      {"kind", "parallel"},
      {"copies", r.copies},
      {"d_in", r.d_in},
      {"d_out", r.d_out},
      {"rho_factors", "I(1..k) x A"},
      {"povm_factors", "A x O(1..k)"},
      {"sigma_rank", r.sigma_rank},
      {"sigma", matrix_json(r.sigma)},
      {"rho", matrix_json(r.rho)},
      {"povm", povm_json(r.povm)},
  };
  os << j.dump(1) << "\n";
}

void write_realization_json(std::ostream& os, const SequentialRealization& r) {
  nlohmann::json j = {
      {"kind", "sequential"},
      {"copies", 2},
      {"d_in", r.d_in},
      {"d_out", r.d_out},
      {"rho_factors", "I1 x A1"},
      {"phi_factors", "A1 O1 -> I2 A2, A2 = I1 O1 I2"},
      {"povm_factors", "A2 x O2"},
      {"sigma_rank", r.sigma_rank},
      {"e_rank", r.e_rank},
      {"sigma", matrix_json(r.sigma)},
      {"e", matrix_json(r.e)},
      {"rho", matrix_json(r.rho)},
      {"phi", matrix_json(r.phi)},
      {"povm", povm_json(r.povm)},
  };
  os << j.dump(1) << "\n";
}

void write_realization_json(std::ostream& os, const GeneralRealization& r) {
  // The process matrix is block diagonal in the pointer basis; store the
  // blocks T_i rather than the full (D N_O)^2 matrix.
  nlohmann::json blocks = nlohmann::json::array();
  for (Index i = 0; i < r.outcomes; ++i) {
    CMatrix b(r.dim, r.dim);
    for (Index x = 0; x < r.dim; ++x)
      for (Index y = 0; y < r.dim; ++y)
        b(x, y) = r.process(x * r.outcomes + i, y * r.outcomes + i);
    blocks.push_back(matrix_json(b));
  }
  nlohmann::json j = {
      {"kind", "general"},
      {"dim", r.dim},
      {"outcomes", r.outcomes},
      {"factors", "(I1 O1 I2 O2) x P, W = sum_i blocks[i] x |i><i|"},
      {"pointer_povm", "computational basis of P"},
      {"blocks", blocks},
  };
  os << j.dump(1) << "\n";
}

}  // namespace bm
