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

#include "bayesmetro/operator.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace bm {

namespace {

std::mutex g_sink_mutex;
WarningSink g_sink;

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermitian_drift(const CMatrix& m) {
  const double scale = max_abs(m);
  if (scale == 0.0) return 0.0;
  return max_abs(m - m.adjoint()) / scale;
}

std::vector<Index> strides(const SystemLayout& layout) {
  const auto& f = layout.factors();
  std::vector<Index> s(f.size(), 1);
  for (std::size_t i = f.size(); i-- > 1;) s[i - 1] = s[i] * f[i].dim;
  return s;
}

void require_labels(const SystemLayout& layout,
                    std::span<const std::string> labels) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!layout.contains(l)) {
      fail("unknown label '" + l + "' for layout " + layout.to_string());
    }
    if (!seen.insert(l).second) fail("duplicate label '" + l + "'");
  }
}

}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = std::move(sink);
}

void warn(const std::string& message) {
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::cerr << "bayesmetro warning: " << message << '\n';
  }
}

// ---------------------------------------------------------------------------
// SystemLayout

SystemLayout::SystemLayout(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim < 1) fail("factor '" + f.label + "' has non-positive dimension");
    if (!seen.insert(f.label).second) {
      fail("duplicate factor label '" + f.label + "'");
    }
    total_ *= f.dim;
  }
}

bool SystemLayout::contains(std::string_view label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

std::size_t SystemLayout::position(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  fail("unknown label '" + std::string(label) + "' for layout " + to_string());
}

Index SystemLayout::dim(std::string_view label) const {
  return factors_[position(label)].dim;
}

std::vector<std::string> SystemLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

SystemLayout SystemLayout::concat(const SystemLayout& other) const {
  std::vector<Factor> f = factors_;
  for (const auto& g : other.factors_) {
    if (contains(g.label)) {
      fail("label collision on '" + g.label + "' in kron");
    }
    f.push_back(g);
  }
  return SystemLayout(std::move(f));
}

SystemLayout SystemLayout::without(std::span<const std::string> labels) const {
  std::vector<Factor> f;
  for (const auto& g : factors_) {
    if (std::find(labels.begin(), labels.end(), g.label) == labels.end()) {
      f.push_back(g);
    }
  }
  return SystemLayout(std::move(f));
}

SystemLayout SystemLayout::relabeled(std::string_view from,
                                     std::string_view to) const {
  std::vector<Factor> f = factors_;
  f[position(from)].label = std::string(to);
  return SystemLayout(std::move(f));
}

std::string SystemLayout::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << ", ";
    os << factors_[i].label << ':' << factors_[i].dim;
  }
  os << ')';
  return os.str();
}

SystemLayout copies_layout(int k, Index d_in, Index d_out) {
  std::vector<Factor> f;
  for (int c = 1; c <= k; ++c) {
    f.push_back({"I" + std::to_string(c), d_in});
    f.push_back({"O" + std::to_string(c), d_out});
  }
  return SystemLayout(std::move(f));
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(SystemLayout layout, CMatrix entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
  const Index d = layout_.total_dim();
  if (entries_.rows() != d || entries_.cols() != d) {
    fail("operator of size " + std::to_string(entries_.rows()) + "x" +
         std::to_string(entries_.cols()) + " does not match layout " +
         layout_.to_string());
  }
  if (hermitian_drift(entries_) > 1e-12) {
    fail("operator is not Hermitian (relative drift " +
         std::to_string(hermitian_drift(entries_)) + ")");
  }
}

HermitianOperator HermitianOperator::symmetrized(SystemLayout layout,
                                                 CMatrix entries) {
  const double drift = hermitian_drift(entries);
  if (drift > 1e-10) {
    warn("Hermiticity drift " + std::to_string(drift) + " on layout " +
         layout.to_string());
  }
  CMatrix sym = 0.5 * (entries + entries.adjoint());
  HermitianOperator out;
  out.layout_ = std::move(layout);
  out.entries_ = std::move(sym);
  if (out.entries_.rows() != out.layout_.total_dim()) {
    fail("operator size does not match layout " + out.layout_.to_string());
  }
  return out;
}

HermitianOperator HermitianOperator::identity(SystemLayout layout) {
  const Index d = layout.total_dim();
  return HermitianOperator(std::move(layout), CMatrix::Identity(d, d));
}

HermitianOperator HermitianOperator::zero(SystemLayout layout) {
  const Index d = layout.total_dim();
  return HermitianOperator(std::move(layout), CMatrix::Zero(d, d));
}

double HermitianOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

HermitianOperator HermitianOperator::operator+(
    const HermitianOperator& other) const {
  if (!(layout_ == other.layout_)) fail("layout mismatch in operator +");
  return symmetrized(layout_, entries_ + other.entries_);
}

HermitianOperator HermitianOperator::operator-(
    const HermitianOperator& other) const {
  if (!(layout_ == other.layout_)) fail("layout mismatch in operator -");
  return symmetrized(layout_, entries_ - other.entries_);
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return symmetrized(layout_, entries_ * s);
}

double inner(const HermitianOperator& a, const HermitianOperator& b) {
  if (!(a.layout() == b.layout())) fail("layout mismatch in inner product");
  // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

// ---------------------------------------------------------------------------
// Tensor operations

namespace detail {

std::vector<Index> sub_offsets(const SystemLayout& layout,
                               std::span<const std::string> labels) {
  const auto s = strides(layout);
  const auto& f = layout.factors();
  std::vector<bool> pick(f.size(), false);
  for (const auto& l : labels) pick[layout.position(l)] = true;
  const Index d = layout.total_dim();
  std::vector<Index> out(static_cast<std::size_t>(d), 0);
  for (Index i = 0; i < d; ++i) {
    Index off = 0;
    for (std::size_t q = 0; q < f.size(); ++q) {
      if (pick[q]) off += ((i / s[q]) % f[q].dim) * s[q];
    }
    out[static_cast<std::size_t>(i)] = off;
  }
  return out;
}

}  // namespace detail

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  SystemLayout layout = a.layout().concat(b.layout());
  CMatrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return HermitianOperator::symmetrized(std::move(layout), std::move(m));
}

HermitianOperator kron_copies(const HermitianOperator& a, int k) {
  if (k < 1) fail("kron_copies needs k >= 1");
  auto relabel = [&](int c) {
    std::vector<Factor> f = a.layout().factors();
    for (auto& x : f) x.label += std::to_string(c);
    return HermitianOperator(SystemLayout(std::move(f)), a.matrix());
  };
  HermitianOperator out = relabel(1);
  for (int c = 2; c <= k; ++c) out = kron(out, relabel(c));
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& a,
                                std::span<const std::string> labels) {
  require_labels(a.layout(), labels);
  const SystemLayout kept = a.layout().without(labels);
  const auto traced_off = detail::sub_offsets(a.layout(), labels);
  const auto kept_labels = kept.labels();
  const auto kept_off = detail::sub_offsets(a.layout(), kept_labels);

  // Enumerate kept indices (rest part, traced digits zero) and traced
  // offsets in increasing order; both lists come out in big-endian order.
  const Index d = a.dim();
  std::vector<Index> rest, tr;
  for (Index i = 0; i < d; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (traced_off[u] == 0) rest.push_back(i);
    if (kept_off[u] == 0) tr.push_back(i);
  }
  const Index n = static_cast<Index>(rest.size());
  CMatrix out = CMatrix::Zero(n, n);
  const CMatrix& m = a.matrix();
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      cplx acc = 0.0;
      for (Index t : tr) acc += m(rest[r] + t, rest[c] + t);
      out(r, c) = acc;
    }
  }
  return HermitianOperator::symmetrized(kept, std::move(out));
}

HermitianOperator partial_transpose(const HermitianOperator& a,
                                    std::span<const std::string> labels) {
  require_labels(a.layout(), labels);
  const auto off = detail::sub_offsets(a.layout(), labels);
  const Index d = a.dim();
  const CMatrix& m = a.matrix();
  CMatrix out(d, d);
  for (Index i = 0; i < d; ++i) {
    const Index ti = off[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j) {
      const Index tj = off[static_cast<std::size_t>(j)];
      out(i - ti + tj, j - tj + ti) = m(i, j);
    }
  }
  return HermitianOperator::symmetrized(a.layout(), std::move(out));
}

HermitianOperator trace_and_replace(const HermitianOperator& a,
                                    std::span<const std::string> labels) {
  require_labels(a.layout(), labels);
  if (labels.empty()) return a;
  const auto off = detail::sub_offsets(a.layout(), labels);
  Index dx = 1;
  for (const auto& l : labels) dx *= a.layout().dim(l);
  const Index d = a.dim();
  const CMatrix& m = a.matrix();

  std::vector<Index> xs;
  for (Index i = 0; i < d; ++i) {
    if (i == off[static_cast<std::size_t>(i)]) xs.push_back(i);
  }
  // Reduced entries depend only on the rest parts of (i, j).
  CMatrix out = CMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    const Index ti = off[static_cast<std::size_t>(i)];
    const Index ri = i - ti;
    for (Index j = 0; j < d; ++j) {
      const Index tj = off[static_cast<std::size_t>(j)];
      if (ti != tj) continue;
      const Index rj = j - tj;
      if (ti == 0) {
        cplx acc = 0.0;
        for (Index x : xs) acc += m(ri + x, rj + x);
        out(i, j) = acc / static_cast<double>(dx);
      } else {
        out(i, j) = out(ri, rj);
      }
    }
  }
  return HermitianOperator::symmetrized(a.layout(), std::move(out));
}

HermitianOperator permute(const HermitianOperator& a,
                          std::span<const std::string> order) {
  const auto& src = a.layout();
  if (order.size() != src.size()) fail("permute: order must list every label");
  require_labels(src, order);
  std::vector<Factor> f;
  for (const auto& l : order) f.push_back({l, src.dim(l)});
  SystemLayout dst(std::move(f));
  const auto s_src = strides(src);
  const auto s_dst = strides(dst);
  const Index d = a.dim();
  std::vector<Index> map(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    Index j = 0;
    for (std::size_t q = 0; q < order.size(); ++q) {
      const std::size_t p = src.position(order[q]);
      j += ((i / s_src[p]) % src.factors()[p].dim) * s_dst[q];
    }
    map[static_cast<std::size_t>(i)] = j;
  }
  CMatrix out(d, d);
  const CMatrix& m = a.matrix();
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      out(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) =
          m(i, j);
    }
  }
  return HermitianOperator(std::move(dst), std::move(out));
}

HermitianOperator extend_to(const HermitianOperator& a,
                            const SystemLayout& target) {
  std::vector<Factor> missing;
  for (const auto& f : target.factors()) {
    if (a.layout().contains(f.label)) {
      if (a.layout().dim(f.label) != f.dim) {
        fail("extend_to: dimension mismatch on '" + f.label + "'");
      }
    } else {
      missing.push_back(f);
    }
  }
  if (a.layout().size() + missing.size() != target.size()) {
    fail("extend_to: target " + target.to_string() + " does not contain " +
         a.layout().to_string());
  }
  HermitianOperator full = a;
  if (!missing.empty()) {
    full = kron(a, HermitianOperator::identity(SystemLayout(missing)));
  }
  const auto order = target.labels();
  return permute(full, order);
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

ChoiOperator choi_from_kraus(std::span<const CMatrix> kraus,
                             const std::string& in_label,
                             const std::string& out_label) {
  if (kraus.empty()) fail("choi_from_kraus: empty Kraus list");
  const Index d_out = kraus.front().rows();
  const Index d_in = kraus.front().cols();
  CMatrix completeness = CMatrix::Zero(d_in, d_in);
  for (const auto& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in) {
      fail("choi_from_kraus: inconsistent Kraus dimensions");
    }
    completeness += k.adjoint() * k;
  }
  const double dev =
      (completeness - CMatrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    fail("choi_from_kraus: completeness violated by " + std::to_string(dev));
  }
  CMatrix j = CMatrix::Zero(d_in * d_out, d_in * d_out);
  for (const auto& k : kraus) {
    const CVector v = vec(k);
    j += v * v.adjoint();
  }
  return HermitianOperator::symmetrized(
      SystemLayout({{in_label, d_in}, {out_label, d_out}}), std::move(j));
}

HermitianOperator apply_choi(const HermitianOperator& state,
                             const HermitianOperator& choi,
                             std::span<const std::string> in_labels) {
  require_labels(state.layout(), in_labels);
  require_labels(choi.layout(), in_labels);
  for (const auto& l : in_labels) {
    if (state.layout().dim(l) != choi.layout().dim(l)) {
      fail("apply_choi: dimension mismatch on '" + l + "'");
    }
  }
  const SystemLayout rest = state.layout().without(in_labels);
  const SystemLayout outs = choi.layout().without(in_labels);
  std::vector<Factor> ins;
  for (const auto& l : in_labels) ins.push_back({l, state.layout().dim(l)});
  const SystemLayout joint = rest.concat(SystemLayout(ins)).concat(outs);

  const HermitianOperator st = extend_to(partial_transpose(state, in_labels),
                                         joint);
  const HermitianOperator ch = extend_to(choi, joint);
  CMatrix prod = st.matrix() * ch.matrix();
  // The product is not Hermitian in general; trace out inputs entrywise.
  const auto off = detail::sub_offsets(joint, in_labels);
  const SystemLayout result = joint.without(in_labels);
  const auto kept_off = detail::sub_offsets(joint, result.labels());
  std::vector<Index> keep, tr;
  for (Index i = 0; i < joint.total_dim(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (off[u] == 0) keep.push_back(i);
    if (kept_off[u] == 0) tr.push_back(i);
  }
  const Index n = static_cast<Index>(keep.size());
  CMatrix out = CMatrix::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      cplx acc = 0.0;
      for (Index t : tr) acc += prod(keep[r] + t, keep[c] + t);
      out(r, c) = acc;
    }
  }
  return HermitianOperator::symmetrized(result, std::move(out));
}

}  // namespace bm
