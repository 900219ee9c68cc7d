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

#include "bayesmetro/testers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace bm {

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Parallel:
      return "parallel";
    case StrategyKind::Sequential:
      return "sequential";
    case StrategyKind::General:
      return "general";
  }
  return "unknown";
}

StrategyKind parse_strategy(const std::string& name) {
  if (name == "parallel" || name == "par") return StrategyKind::Parallel;
  if (name == "sequential" || name == "seq") return StrategyKind::Sequential;
  if (name == "general" || name == "gen") return StrategyKind::General;
  fail("unknown strategy class '" + name + "'");
}

TesterSet::TesterSet(std::vector<HermitianOperator> elements,
                     StrategyClass strategy)
    : elements_(std::move(elements)), strategy_(strategy) {
  if (elements_.empty()) fail("tester set needs at least one element");
  for (const auto& e : elements_) {
    if (!(e.layout() == elements_[0].layout())) {
      fail("tester elements must share one layout");
    }
  }
}

HermitianOperator TesterSet::sum() const {
  CMatrix w = CMatrix::Zero(elements_[0].dim(), elements_[0].dim());
  for (const auto& e : elements_) w += e.matrix();
  return HermitianOperator::symmetrized(layout(), std::move(w));
}

CMatrix TesterSet::vectorized() const {
  const Index d = elements_[0].dim();
  CMatrix out(d * d, static_cast<Index>(elements_.size()));
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    out.col(static_cast<Index>(i)) = vec(elements_[i].matrix());
  }
  return out;
}

HermitianOperator apply_combination(const ReplaceCombination& combo,
                                    const HermitianOperator& w) {
  CMatrix out = CMatrix::Zero(w.dim(), w.dim());
  for (const auto& term : combo) {
    if (term.labels.empty()) {
      out += term.coeff * w.matrix();
    } else {
      out += term.coeff * trace_and_replace(w, term.labels).matrix();
    }
  }
  return HermitianOperator::symmetrized(w.layout(), std::move(out));
}

namespace {

std::string label(char c, int i) { return std::string(1, c) + std::to_string(i); }

ReplaceCombination difference(std::vector<std::string> lhs,
                              std::vector<std::string> rhs) {
  return {{1.0, std::move(lhs)}, {-1.0, std::move(rhs)}};
}

void check_copies(int k) {
  if (k < 1) fail("strategy needs k >= 1 copies");
}

}  // namespace

AffineConstraints constraints_parallel(int k, Index d_in, Index d_out) {
  check_copies(k);
  AffineConstraints c;
  c.layout = copies_layout(k, d_in, d_out);
  c.trace_value = std::pow(static_cast<double>(d_out), k);
  std::vector<std::string> outs;
  for (int i = 1; i <= k; ++i) outs.push_back(label('O', i));
  c.kernels.push_back(difference({}, outs));
  return c;
}

AffineConstraints constraints_sequential(int k, Index d_in, Index d_out) {
  check_copies(k);
  AffineConstraints c;
  c.layout = copies_layout(k, d_in, d_out);
  c.trace_value = std::pow(static_cast<double>(d_out), k);
  c.kernels.push_back(difference({}, {label('O', k)}));
  // _{I_j O_j ... I_k O_k} W = _{O_{j-1} I_j O_j ... I_k O_k} W
  for (int j = k; j >= 2; --j) {
    std::vector<std::string> tail;
    for (int i = j; i <= k; ++i) {
      tail.push_back(label('I', i));
      tail.push_back(label('O', i));
    }
    std::vector<std::string> wider = tail;
    wider.insert(wider.begin(), label('O', j - 1));
    c.kernels.push_back(difference(tail, wider));
  }
  return c;
}

AffineConstraints constraints_general_k2(Index d_in, Index d_out) {
  AffineConstraints c;
  c.layout = copies_layout(2, d_in, d_out);
  c.trace_value = static_cast<double>(d_out * d_out);
  c.kernels.push_back(difference({"I2", "O2"}, {"O1", "I2", "O2"}));
  c.kernels.push_back(difference({"I1", "O1"}, {"O2", "I1", "O1"}));
  // W = _{O1} W + _{O2} W - _{O1 O2} W
  c.kernels.push_back({{1.0, {}},
                       {-1.0, {"O1"}},
                       {-1.0, {"O2"}},
                       {1.0, {"O1", "O2"}}});
  return c;
}

AffineConstraints constraints_for(const StrategyClass& strategy, Index d_in,
                                  Index d_out) {
  switch (strategy.kind) {
    case StrategyKind::Parallel:
      return constraints_parallel(strategy.copies, d_in, d_out);
    case StrategyKind::Sequential:
      return constraints_sequential(strategy.copies, d_in, d_out);
    case StrategyKind::General:
      if (strategy.copies == 1) return constraints_parallel(1, d_in, d_out);
      if (strategy.copies != 2) {
        fail("general strategy class is only supported for k <= 2");
      }
      return constraints_general_k2(d_in, d_out);
  }
  fail("unknown strategy class");
}

double constraint_residual(const AffineConstraints& c,
                           const HermitianOperator& w) {
  if (!(w.layout() == c.layout)) {
    fail("constraint layout " + c.layout.to_string() +
         " does not match operator layout " + w.layout().to_string());
  }
  double r = std::abs(w.trace() - c.trace_value);
  for (const auto& k : c.kernels) {
    r = std::max(r, apply_combination(k, w).matrix().norm());
  }
  return r;
}

namespace {

// Orthonormal basis of Hermitian D x D matrices under Re Tr(AB): E_aa,
// (E_ab + E_ba)/sqrt2, i(E_ab - E_ba)/sqrt2 for a < b.
struct HermitianBasis {
  Index dim;
  explicit HermitianBasis(Index d) : dim(d) {}

  Index size() const { return dim * dim; }

  CMatrix element(Index t) const {
    CMatrix m = CMatrix::Zero(dim, dim);
    if (t < dim) {
      m(t, t) = 1.0;
      return m;
    }
    Index idx = t - dim;
    const bool imag = idx % 2 == 1;
    idx /= 2;
    auto [a, b] = pair(idx);
    const double s = 1.0 / std::sqrt(2.0);
    if (imag) {
      m(a, b) = cplx(0.0, s);
      m(b, a) = cplx(0.0, -s);
    } else {
      m(a, b) = s;
      m(b, a) = s;
    }
    return m;
  }

  RVector coords(const CMatrix& h) const {
    RVector c(size());
    for (Index a = 0; a < dim; ++a) c(a) = h(a, a).real();
    Index idx = 0;
    for (Index a = 0; a < dim; ++a) {
      for (Index b = a + 1; b < dim; ++b) {
        c(dim + 2 * idx) = std::sqrt(2.0) * h(a, b).real();
        c(dim + 2 * idx + 1) = std::sqrt(2.0) * h(a, b).imag();
        ++idx;
      }
    }
    return c;
  }

  std::pair<Index, Index> pair(Index idx) const {
    for (Index a = 0; a < dim; ++a) {
      const Index row = dim - a - 1;
      if (idx < row) return {a, a + 1 + idx};
      idx -= row;
    }
    fail("hermitian basis index out of range");
  }
};

std::string constraint_key(const AffineConstraints& c) {
  std::ostringstream os;
  os << c.layout.to_string();
  for (const auto& k : c.kernels) {
    os << "|";
    for (const auto& t : k) {
      os << t.coeff << ":";
      for (const auto& l : t.labels) os << l << ",";
      os << ";";
    }
  }
  return os.str();
}

}  // namespace

const CMatrix& complement_basis(const AffineConstraints& c) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const CMatrix>> memo;
  const std::string key = constraint_key(c);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return *it->second;
  }

  // Candidates: images of the Hermitian basis under every kernel map.  They
  // span the complement and are sparse, which keeps the Schur complement
  // cheap.  Sparsest first, then greedy selection of an independent subset
  // (twice-iterated Gram-Schmidt on the real coordinates).
  const Index d = c.layout.total_dim();
  const HermitianBasis basis(d);
  const Index n = basis.size();
  struct Candidate {
    Index nnz;
    RVector coords;
  };
  std::vector<Candidate> cand;
  for (const auto& k : c.kernels) {
    for (Index t = 0; t < n; ++t) {
      const HermitianOperator bt(c.layout, basis.element(t));
      RVector v = basis.coords(apply_combination(k, bt).matrix());
      for (Index i = 0; i < n; ++i) {
        if (std::abs(v(i)) < 1e-14) v(i) = 0.0;
      }
      const double nv = v.norm();
      if (nv < 1e-12) continue;
      const Index nnz = (v.array() != 0.0).count();
      cand.push_back({nnz, v / nv});
    }
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.nnz < b.nnz;
                   });
  RMatrix q(n, n);
  Index rank = 0;
  std::vector<const RVector*> chosen;
  for (const auto& cd : cand) {
    if (rank == n) break;
    RVector r = cd.coords;
    for (int pass = 0; pass < 2; ++pass) {
      if (rank > 0) r -= q.leftCols(rank) * (q.leftCols(rank).transpose() * r);
    }
    const double nr = r.norm();
    if (nr < 1e-6) continue;
    q.col(rank++) = r / nr;
    chosen.push_back(&cd.coords);
  }
  auto out = std::make_shared<CMatrix>(d * d, rank);
  for (Index p = 0; p < rank; ++p) {
    const RVector& coef = *chosen[static_cast<std::size_t>(p)];
    CMatrix a = CMatrix::Zero(d, d);
    for (Index t = 0; t < n; ++t) {
      if (coef(t) != 0.0) a += coef(t) * basis.element(t);
    }
    out->col(p) = vec(a);
  }

  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = memo.emplace(key, std::move(out));
  return *it->second;
}

std::vector<CMatrix> build_objective(const CMatrix& powers,
                                     const RVector& weights,
                                     const RMatrix& cost_table, Index dim) {
  if (powers.cols() != weights.size() || cost_table.rows() != weights.size()) {
    fail("build_objective: hypothesis count mismatch");
  }
  if (powers.rows() != dim * dim) fail("build_objective: dimension mismatch");
  const RMatrix scaled = weights.asDiagonal() * cost_table;
  const CMatrix all = powers * scaled.cast<cplx>();
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(cost_table.cols()));
  for (Index i = 0; i < all.cols(); ++i) {
    CMatrix ci = Eigen::Map<const CMatrix>(all.col(i).data(), dim, dim);
    out.push_back((ci + ci.adjoint()) * 0.5);
  }
  return out;
}

sdp::Problem<cplx> assemble_tester_problem(const AffineConstraints& constraints,
                                           const std::vector<CMatrix>& objective,
                                           sdp::Sense sense) {
  if (objective.empty()) fail("tester SDP needs at least one outcome");
  const Index d = constraints.layout.total_dim();
  for (const auto& c : objective) {
    if (c.rows() != d || c.cols() != d) {
      fail("objective operator dimension does not match the strategy layout");
    }
  }
  const CMatrix& perp = complement_basis(constraints);
  const Index m = perp.cols() + 1;
  CMatrix templ(d * d, m);
  const CMatrix id = CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d));
  templ.col(0) = vec(id);
  templ.rightCols(perp.cols()) = perp;

  sdp::Problem<cplx> p;
  p.sense = sense;
  p.cost = objective;
  p.templates = {std::move(templ)};
  p.block_template.assign(objective.size(), 0);
  p.rhs = RVector::Zero(m);
  p.rhs(0) = constraints.trace_value / std::sqrt(static_cast<double>(d));
  return p;
}

TesterSolution solve_testers(const StrategyClass& strategy, Index d_in,
                             Index d_out, const std::vector<CMatrix>& objective,
                             sdp::Sense sense, const SolveSettings& settings) {
  const AffineConstraints cons = constraints_for(strategy, d_in, d_out);
  const sdp::Problem<cplx> problem =
      assemble_tester_problem(cons, objective, sense);
  sdp::Options opts;
  opts.tolerance = settings.tolerance;
  opts.max_iterations = settings.max_iterations;
  const sdp::Solution<cplx> sol =
      sdp::solve_hermitian(problem, opts, settings.backend);

  TesterSolution out;
  out.diagnostics.status = sol.status;
  out.diagnostics.iterations = sol.iterations;
  out.diagnostics.primal_residual = sol.primal_residual;
  out.diagnostics.dual_residual = sol.dual_residual;
  out.diagnostics.gap = sol.gap;
  out.diagnostics.primal_objective = sol.primal_objective;
  out.diagnostics.dual_objective = sol.dual_objective;
  out.diagnostics.constraints = problem.constraints();

  switch (sol.status) {
    case sdp::Status::Optimal:
      break;
    case sdp::Status::Degraded:
      // A stall just above tolerance is usable; anything further off is not.
      if (std::max({sol.primal_residual, sol.dual_residual, std::abs(sol.gap)}) >
          1e3 * settings.tolerance) {
        throw Error(ErrorKind::Solver,
                    std::string("tester SDP (") + to_string(strategy.kind) + ", k=" +
                        std::to_string(strategy.copies) + ") did not converge in " +
                        std::to_string(sol.iterations) + " iterations: pinf=" +
                        std::to_string(sol.primal_residual) + " dinf=" +
                        std::to_string(sol.dual_residual) + " gap=" + std::to_string(sol.gap));
      }
      warn(std::string("tester SDP (") + to_string(strategy.kind) +
           ", k=" + std::to_string(strategy.copies) +
           ") stopped above tolerance: pinf=" +
           std::to_string(sol.primal_residual) +
           " dinf=" + std::to_string(sol.dual_residual) +
           " gap=" + std::to_string(sol.gap));
      break;
    default:
      throw Error(ErrorKind::Solver,
                  std::string("tester SDP failed with status ") +
                      sdp::to_string(sol.status));
  }

  std::vector<HermitianOperator> elems;
  elems.reserve(sol.primal.size());
  for (const auto& x : sol.primal) {
    elems.push_back(HermitianOperator::symmetrized(cons.layout, x));
  }
  out.testers = TesterSet(std::move(elems), strategy);
  out.value = sol.primal_objective;
  return out;
}

}  // namespace bm
