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

// Infeasible-start primal-dual path following with the HKM search direction
// and Mehrotra's predictor-corrector.

#include "bayesmetro/sdp.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

namespace bm::sdp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::Degraded:
      return "degraded";
    case Status::PrimalInfeasible:
      return "primal_infeasible";
    case Status::DualInfeasible:
      return "dual_infeasible";
    case Status::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

template <class Scalar>
void Problem<Scalar>::validate() const {
  if (cost.empty()) fail("sdp: problem has no blocks");
  if (block_template.size() != cost.size()) {
    fail("sdp: block_template size does not match the number of blocks");
  }
  for (std::size_t b = 0; b < cost.size(); ++b) {
    const auto& c = cost[b];
    if (c.rows() != c.cols() || c.rows() == 0) {
      fail("sdp: cost matrix of block " + std::to_string(b) +
           " is not square");
    }
    const std::size_t t = block_template[b];
    if (t >= templates.size()) {
      fail("sdp: block " + std::to_string(b) + " references template " +
           std::to_string(t));
    }
    if (templates[t].rows() != c.rows() * c.rows()) {
      fail("sdp: template " + std::to_string(t) +
           " has the wrong row count for block " + std::to_string(b));
    }
  }
  for (const auto& t : templates) {
    if (t.cols() != rhs.size()) {
      fail("sdp: template column count differs from the constraint count");
    }
  }
}

template struct Problem<double>;
template struct Problem<cplx>;

namespace {

template <class Scalar>
Mat<Scalar> hermitian_part(const Mat<Scalar>& m) {
  return (m + m.adjoint()) * 0.5;
}

template <class Scalar>
double frob_inner(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  return std::real((a.array().conjugate() * b.array()).sum());
}

/// Largest alpha with X + alpha D >= 0 (infinity if none).
template <class Scalar>
double max_step(const Mat<Scalar>& x, const Mat<Scalar>& d, bool* ok) {
  Eigen::LLT<Mat<Scalar>> llt(x);
  if (llt.info() != Eigen::Success) {
    *ok = false;
    return 0.0;
  }
  const Index n = x.rows();
  Mat<Scalar> linv = llt.matrixL().solve(Mat<Scalar>::Identity(n, n));
  Mat<Scalar> g = linv * d * linv.adjoint();
  g = hermitian_part<Scalar>(g);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

template <class Scalar>
class Ipm {
 public:
  Ipm(const Problem<Scalar>& p, const Options& o) : p_(p), o_(o) {
    nb_ = p.blocks();
    m_ = p.constraints();
    sign_ = p.sense == Sense::Maximize ? 1.0 : -1.0;
    for (std::size_t b = 0; b < nb_; ++b) {
      c_.push_back(hermitian_part<Scalar>(p.cost[b]) * sign_);
      dims_.push_back(p.cost[b].rows());
    }
    members_.resize(p.templates.size());
    sparse_.resize(p.templates.size());
    for (std::size_t t = 0; t < p.templates.size(); ++t) {
      const M& pt = p.templates[t];
      const Index nnz = (pt.array() != Scalar(0)).count();
      if (nnz * 4 < pt.size()) {
        std::vector<Eigen::Triplet<Scalar>> trip;
        trip.reserve(static_cast<std::size_t>(nnz));
        for (Index c = 0; c < pt.cols(); ++c) {
          for (Index r = 0; r < pt.rows(); ++r) {
            if (pt(r, c) != Scalar(0)) trip.emplace_back(r, c, pt(r, c));
          }
        }
        sparse_[t].resize(pt.rows(), pt.cols());
        sparse_[t].setFromTriplets(trip.begin(), trip.end());
        has_sparse_.push_back(true);
      } else {
        has_sparse_.push_back(false);
      }
    }
    for (std::size_t b = 0; b < nb_; ++b) {
      members_[p.block_template[b]].push_back(b);
    }
    total_dim_ = 0;
    for (auto d : dims_) total_dim_ += static_cast<double>(d);
    bnorm_ = p.rhs.norm();
    double cn = 0.0;
    for (const auto& c : c_) cn += c.squaredNorm();
    cnorm_ = std::sqrt(cn);
  }

  Solution<Scalar> run();

 private:
  using M = Mat<Scalar>;
  using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // A(X)_p = sum_b Re <A_{b,p}, X_b>
  RVector apply_a(const std::vector<M>& x) const {
    RVector out = RVector::Zero(m_);
    for (std::size_t t = 0; t < members_.size(); ++t) {
      if (members_[t].empty()) continue;
      const Index n = dims_[members_[t][0]];
      M sum = M::Zero(n, n);
      for (auto b : members_[t]) sum += x[b];
      const Eigen::Map<const V> v(sum.data(), n * n);
      out += (p_.templates[t].adjoint() * v).real();
    }
    return out;
  }

  // A*(y) per template.
  std::vector<M> apply_at(const RVector& y) const {
    std::vector<M> out(members_.size());
    for (std::size_t t = 0; t < members_.size(); ++t) {
      if (members_[t].empty()) continue;
      const Index n = dims_[members_[t][0]];
      V v = p_.templates[t] * y.cast<Scalar>();
      out[t] = hermitian_part<Scalar>(Eigen::Map<M>(v.data(), n, n));
    }
    return out;
  }

  RMatrix schur(const std::vector<M>& x, const std::vector<M>& zinv) const;

  void initial_point();

  const Problem<Scalar>& p_;
  Options o_;
  std::size_t nb_ = 0;
  Index m_ = 0;
  double sign_ = 1.0;
  std::vector<M> c_;
  std::vector<Index> dims_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<Eigen::SparseMatrix<Scalar>> sparse_;
  std::vector<bool> has_sparse_;
  double total_dim_ = 0.0;
  double bnorm_ = 0.0;
  double cnorm_ = 0.0;

  std::vector<M> x_, z_;
  RVector y_;
};

template <class Scalar>
RMatrix Ipm<Scalar>::schur(const std::vector<M>& x,
                           const std::vector<M>& zinv) const {
  RMatrix out = RMatrix::Zero(m_, m_);
  for (std::size_t t = 0; t < members_.size(); ++t) {
    if (members_[t].empty()) continue;
    const Index n = dims_[members_[t][0]];
    const M& pt = p_.templates[t];
    if (n * n <= 2048) {
      // S vec(A) = sum_b vec(Z_b^-1 A X_b).  With G = [vec Z_b^-1][vec X_b]^T,
      // S(j n + i, c n + r) = G(r n + i, j n + c).
      const auto& mem = members_[t];
      const Index nb = static_cast<Index>(mem.size());
      M zm(n * n, nb), xm(n * n, nb);
      for (Index k = 0; k < nb; ++k) {
        const auto b = mem[static_cast<std::size_t>(k)];
        zm.col(k) = Eigen::Map<const V>(zinv[b].data(), n * n);
        xm.col(k) = Eigen::Map<const V>(x[b].data(), n * n);
      }
      const M g = zm * xm.transpose();
      // Column (c n + r) of S as a vector over (j n + i).
      auto s_col = [&](Index idx, V& out) {
        const Index r = idx % n;
        const Index c = idx / n;
        for (Index j = 0; j < n; ++j) {
          out.segment(j * n, n) = g.block(r * n, j * n + c, n, 1);
        }
      };
      V col(n * n);
      if (has_sparse_[t]) {
        const auto& sp = sparse_[t];
        M sa = M::Zero(n * n, m_);
        for (Index q = 0; q < m_; ++q) {
          for (typename Eigen::SparseMatrix<Scalar>::InnerIterator e(sp, q); e;
               ++e) {
            s_col(e.row(), col);
            sa.col(q) += e.value() * col;
          }
        }
        for (Index q = 0; q < m_; ++q) {
          for (typename Eigen::SparseMatrix<Scalar>::InnerIterator e(sp, q); e;
               ++e) {
            out.row(q) += (std::conj(e.value()) * sa.row(e.row())).real();
          }
        }
      } else {
        M s(n * n, n * n);
        for (Index idx = 0; idx < n * n; ++idx) {
          s_col(idx, col);
          s.col(idx) = col;
        }
        const M sp = s * pt;
        out += (pt.adjoint() * sp).real();
      }
    } else {
      M g(n * n, m_);
      for (auto b : members_[t]) {
        for (Index q = 0; q < m_; ++q) {
          const Eigen::Map<const M> aq(pt.col(q).data(), n, n);
          const M gq = zinv[b] * aq * x[b];
          g.col(q) = Eigen::Map<const V>(gq.data(), n * n);
        }
        out += (pt.adjoint() * g).real();
      }
    }
  }
  return (out + out.transpose()) * 0.5;
}

template <class Scalar>
void Ipm<Scalar>::initial_point() {
  x_.resize(nb_);
  z_.resize(nb_);
  y_ = RVector::Zero(m_);
  for (std::size_t b = 0; b < nb_; ++b) {
    const Index n = dims_[b];
    const double sn = std::sqrt(static_cast<double>(n));
    const M& pt = p_.templates[p_.block_template[b]];
    double xi = std::max(10.0, sn);
    double amax = 0.0;
    for (Index q = 0; q < m_; ++q) {
      const double an = pt.col(q).norm();
      amax = std::max(amax, an);
      xi = std::max(xi, static_cast<double>(n) * (1.0 + std::abs(p_.rhs(q))) /
                            (1.0 + an));
    }
    const double eta =
        std::max({10.0, sn, 1.0 + c_[b].norm(), amax});
    x_[b] = M::Identity(n, n) * xi;
    z_[b] = M::Identity(n, n) * eta;
  }
}

template <class Scalar>
Solution<Scalar> Ipm<Scalar>::run() {
  initial_point();
  Solution<Scalar> sol;
  sol.status = Status::Degraded;
  const double tol = o_.tolerance;
  int stalls = 0;

  auto finish = [&](Status st, int it) {
    sol.primal = x_;
    sol.slack.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) sol.slack[b] = z_[b] * sign_;
    sol.dual = y_ * sign_;
    sol.iterations = it;
    sol.status = st;
    return sol;
  };

  for (int it = 0; it < o_.max_iterations; ++it) {
    // Residuals.
    const RVector rp = p_.rhs - apply_a(x_);
    const std::vector<M> aty = apply_at(y_);
    std::vector<M> rd(nb_);
    double rdn = 0.0;
    double pobj = 0.0;
    double xz = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) {
      rd[b] = aty[p_.block_template[b]] - c_[b] - z_[b];
      rdn += rd[b].squaredNorm();
      pobj += frob_inner<Scalar>(c_[b], x_[b]);
      xz += frob_inner<Scalar>(x_[b], z_[b]);
    }
    const double dobj = p_.rhs.dot(y_);
    const double pinf = rp.norm() / (1.0 + bnorm_);
    const double dinf = std::sqrt(rdn) / (1.0 + cnorm_);
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double gap = std::max(std::abs(pobj - dobj), std::abs(xz)) / denom;
    sol.primal_objective = pobj * sign_;
    sol.dual_objective = dobj * sign_;
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    sol.gap = gap;
    if (!std::isfinite(pobj) || !std::isfinite(dobj)) {
      return finish(Status::NumericalFailure, it);
    }
    if (pinf <= tol && dinf <= tol && gap <= tol) {
      return finish(Status::Optimal, it);
    }
    if (y_.cwiseAbs().maxCoeff() > 1e13 && pinf > 1e-3) {
      return finish(Status::PrimalInfeasible, it);
    }
    double xmax = 0.0;
    for (const auto& x : x_) xmax = std::max(xmax, std::abs(x.trace()));
    if (xmax > 1e13 && dinf > 1e-3) {
      return finish(Status::DualInfeasible, it);
    }

    const double mu = xz / total_dim_;

    // Z^-1 per block.
    std::vector<M> zinv(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      Eigen::LLT<M> llt(z_[b]);
      if (llt.info() != Eigen::Success) {
        return finish(Status::NumericalFailure, it);
      }
      zinv[b] = llt.solve(M::Identity(dims_[b], dims_[b]));
      zinv[b] = hermitian_part<Scalar>(zinv[b]);
    }

    RMatrix schur_m = schur(x_, zinv);
    Eigen::LLT<RMatrix> mfac(schur_m);
    Eigen::LDLT<RMatrix> mldlt;
    const bool use_llt = mfac.info() == Eigen::Success;
    if (!use_llt) mldlt.compute(schur_m);
    auto solve_m = [&](const RVector& r) -> RVector {
      return use_llt ? RVector(mfac.solve(r)) : RVector(mldlt.solve(r));
    };

    // Direction for target mu_t and corrector term k (may be empty).
    auto direction = [&](double mu_t, const std::vector<M>* k,
                         std::vector<M>& dx, RVector& dy,
                         std::vector<M>& dz) {
      std::vector<M> h(nb_);
      for (std::size_t b = 0; b < nb_; ++b) {
        h[b] = mu_t * zinv[b] - x_[b] - zinv[b] * rd[b] * x_[b];
        if (k) h[b] -= (*k)[b];
      }
      dy = solve_m(apply_a(h) - rp);
      const std::vector<M> atdy = apply_at(dy);
      dx.resize(nb_);
      dz.resize(nb_);
      for (std::size_t b = 0; b < nb_; ++b) {
        dz[b] = atdy[p_.block_template[b]] + rd[b];
        dx[b] = hermitian_part<Scalar>(
            M(h[b] - zinv[b] * atdy[p_.block_template[b]] * x_[b]));
      }
    };

    auto step_lengths = [&](const std::vector<M>& dx,
                            const std::vector<M>& dz, double* ap, double* ad) {
      double sp = std::numeric_limits<double>::infinity();
      double sd = std::numeric_limits<double>::infinity();
      bool ok = true;
      for (std::size_t b = 0; b < nb_; ++b) {
        sp = std::min(sp, max_step<Scalar>(x_[b], dx[b], &ok));
        sd = std::min(sd, max_step<Scalar>(z_[b], dz[b], &ok));
      }
      if (!ok) return false;
      *ap = std::min(1.0, o_.step_fraction * sp);
      *ad = std::min(1.0, o_.step_fraction * sd);
      return true;
    };

    // Predictor.
    std::vector<M> dx_a, dz_a;
    RVector dy_a;
    direction(0.0, nullptr, dx_a, dy_a, dz_a);
    double ap = 0.0, ad = 0.0;
    if (!step_lengths(dx_a, dz_a, &ap, &ad)) {
      return finish(Status::NumericalFailure, it);
    }
    double xz_aff = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) {
      xz_aff += frob_inner<Scalar>(M(x_[b] + ap * dx_a[b]),
                                   M(z_[b] + ad * dz_a[b]));
    }
    const double mu_aff = xz_aff / total_dim_;
    double sigma = mu > 0.0 ? std::pow(std::max(mu_aff, 0.0) / mu, 3.0) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    std::vector<M> k(nb_);
    for (std::size_t b = 0; b < nb_; ++b) k[b] = zinv[b] * dz_a[b] * dx_a[b];
    std::vector<M> dx, dz;
    RVector dy;
    direction(sigma * mu, &k, dx, dy, dz);
    if (!step_lengths(dx, dz, &ap, &ad)) {
      return finish(Status::NumericalFailure, it);
    }
    if (!dy.allFinite()) return finish(Status::NumericalFailure, it);

    for (std::size_t b = 0; b < nb_; ++b) {
      x_[b] = hermitian_part<Scalar>(M(x_[b] + ap * dx[b]));
      z_[b] = hermitian_part<Scalar>(M(z_[b] + ad * dz[b]));
    }
    y_ += ad * dy;

    if (ap < 1e-8 && ad < 1e-8) {
      if (++stalls >= 3) return finish(Status::Degraded, it + 1);
    } else {
      stalls = 0;
    }
  }
  // Refresh reported residuals at the final iterate.
  {
    const RVector rp = p_.rhs - apply_a(x_);
    const std::vector<M> aty = apply_at(y_);
    double rdn = 0.0, pobj = 0.0, xz = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) {
      rdn += (aty[p_.block_template[b]] - c_[b] - z_[b]).squaredNorm();
      pobj += frob_inner<Scalar>(c_[b], x_[b]);
      xz += frob_inner<Scalar>(x_[b], z_[b]);
    }
    const double dobj = p_.rhs.dot(y_);
    sol.primal_objective = pobj * sign_;
    sol.dual_objective = dobj * sign_;
    sol.primal_residual = rp.norm() / (1.0 + bnorm_);
    sol.dual_residual = std::sqrt(rdn) / (1.0 + cnorm_);
    sol.gap = std::max(std::abs(pobj - dobj), std::abs(xz)) /
              (1.0 + std::abs(pobj) + std::abs(dobj));
  }
  return finish(Status::Degraded, o_.max_iterations);
}

}  // namespace

template <class Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options& options) {
  problem.validate();
  if (!(options.tolerance > 0.0)) fail("sdp: tolerance must be positive");
  Ipm<Scalar> ipm(problem, options);
  return ipm.run();
}

template Solution<double> solve(const Problem<double>&, const Options&);
template Solution<cplx> solve(const Problem<cplx>&, const Options&);

RMatrix embed(const CMatrix& h) {
  const Index n = h.rows();
  RMatrix r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = h.real();
  r.topRightCorner(n, n) = -h.imag();
  r.bottomLeftCorner(n, n) = h.imag();
  r.bottomRightCorner(n, n) = h.real();
  return r;
}

CMatrix unembed(const RMatrix& r) {
  const Index n = r.rows() / 2;
  CMatrix h(n, n);
  h.real() = (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n)) * 0.5;
  h.imag() = (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n)) * 0.5;
  return h;
}

Problem<double> lower_to_real(const Problem<cplx>& problem) {
  problem.validate();
  Problem<double> out;
  out.sense = problem.sense;
  out.rhs = problem.rhs;
  out.block_template = problem.block_template;
  for (const auto& c : problem.cost) out.cost.push_back(embed(c) * 0.5);
  for (const auto& t : problem.templates) {
    const Index n = static_cast<Index>(std::llround(std::sqrt(t.rows())));
    RMatrix rt(4 * n * n, t.cols());
    for (Index p = 0; p < t.cols(); ++p) {
      const Eigen::Map<const CMatrix> a(t.col(p).data(), n, n);
      const RMatrix e = embed(a) * 0.5;
      rt.col(p) = Eigen::Map<const RVector>(e.data(), 4 * n * n);
    }
    out.templates.push_back(std::move(rt));
  }
  return out;
}

Solution<cplx> lift_from_real(const Solution<double>& real) {
  Solution<cplx> out;
  for (const auto& x : real.primal) out.primal.push_back(unembed(x));
  for (const auto& z : real.slack) out.slack.push_back(unembed(z) * 2.0);
  out.dual = real.dual;
  out.primal_objective = real.primal_objective;
  out.dual_objective = real.dual_objective;
  out.primal_residual = real.primal_residual;
  out.dual_residual = real.dual_residual;
  out.gap = real.gap;
  out.iterations = real.iterations;
  out.status = real.status;
  return out;
}

Solution<cplx> solve_hermitian(const Problem<cplx>& problem,
                               const Options& options, Backend backend) {
  if (backend == Backend::Complex) return solve(problem, options);
  return lift_from_real(solve(lower_to_real(problem), options));
}

void write_triplets(std::ostream& os, const Problem<cplx>& problem) {
  problem.validate();
  os.precision(17);
  os << "sense " << (problem.sense == Sense::Maximize ? "max" : "min") << "\n";
  os << "blocks " << problem.blocks();
  for (const auto& c : problem.cost) os << " " << c.rows();
  os << "\n";
  os << "constraints " << problem.constraints() << "\n";
  os << "templates " << problem.templates.size() << "\n";
  for (Index p = 0; p < problem.rhs.size(); ++p) {
    os << "rhs " << p << " " << problem.rhs(p) << "\n";
  }
  for (std::size_t b = 0; b < problem.blocks(); ++b) {
    const auto& c = problem.cost[b];
    for (Index j = 0; j < c.cols(); ++j) {
      for (Index i = 0; i <= j; ++i) {
        if (c(i, j) == cplx(0.0)) continue;
        os << "C " << b << " " << i << " " << j << " " << c(i, j).real()
           << " " << c(i, j).imag() << "\n";
      }
    }
  }
  for (std::size_t t = 0; t < problem.templates.size(); ++t) {
    const auto& tm = problem.templates[t];
    const Index n = static_cast<Index>(std::llround(std::sqrt(tm.rows())));
    for (Index p = 0; p < tm.cols(); ++p) {
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i <= j; ++i) {
          const cplx v = tm(j * n + i, p);
          if (std::abs(v) < 1e-15) continue;
          os << "A " << t << " " << p << " " << i << " " << j << " "
             << v.real() << " " << v.imag() << "\n";
        }
      }
    }
  }
  for (std::size_t b = 0; b < problem.blocks(); ++b) {
    os << "map " << b << " " << problem.block_template[b] << "\n";
  }
}

}  // namespace bm::sdp
