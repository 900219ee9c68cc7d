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

#include "bayesmetro/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <utility>

#include <Eigen/Eigenvalues>

#include "bayesmetro/rng.hpp"
#include "bayesmetro/testers.hpp"

namespace bm {

namespace {

constexpr double kPi = std::numbers::pi;

RVector normalized(RVector w) {
  if (w.size() == 0) fail("hypothesis set needs at least one point");
  if ((w.array() < 0.0).any() || !w.allFinite()) {
    fail("hypothesis weights must be finite and nonnegative");
  }
  const double s = w.sum();
  if (!(s > 0.0)) fail("hypothesis weights sum to zero");
  return w / s;
}

// Golub-Welsch: nodes and weights of the n-point Gauss-Legendre rule on
// [lo, hi].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double lo,
                                                                   double hi) {
  RMatrix jac = RMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const double half = (hi - lo) / 2.0;
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    x[static_cast<std::size_t>(i)] = lo + half * (es.eigenvalues()(i) + 1.0);
    w[static_cast<std::size_t>(i)] = half * 2.0 * v0 * v0;
  }
  return {x, w};
}

}  // namespace

HypothesisSet::HypothesisSet(std::vector<RVector> points, RVector weights,
                             SamplingMode mode, Domain domain)
    : points_(std::move(points)),
      weights_(normalized(std::move(weights))),
      mode_(mode),
      domain_(domain) {
  if (static_cast<Index>(points_.size()) != weights_.size()) {
    fail("hypothesis point and weight counts differ");
  }
  for (const auto& p : points_) {
    if (p.size() != points_[0].size() || p.size() == 0) {
      fail("hypothesis points must share one positive dimension");
    }
  }
}

HypothesisSet HypothesisSet::with_weights(RVector weights) const {
  if (weights.size() != weights_.size()) fail("weight vector has wrong size");
  HypothesisSet out = *this;
  out.weights_ = normalized(std::move(weights));
  out.raw_mass_ = std::numeric_limits<double>::quiet_NaN();
  return out;
}

HypothesisSet HypothesisSet::with_cache(const ChannelModel& channel,
                                        int copies) const {
  if (copies < 1) fail("cache needs at least one copy");
  if (channel.param_dim() != param_dim()) {
    fail("channel parameter dimension " + std::to_string(channel.param_dim()) +
         " does not match hypothesis dimension " + std::to_string(param_dim()));
  }
  auto cache = std::make_shared<ChoiCache>();
  cache->copies = copies;
  cache->layout = copies_layout(copies, channel.d_in(), channel.d_out());
  cache->channel = std::make_shared<const ChannelModel>(channel);
  const Index d = cache->layout.total_dim();
  cache->powers.resize(d * d, static_cast<Index>(size()));
  cache->cost_choi.reserve(size());
  for (std::size_t j = 0; j < size(); ++j) {
    const std::span<const double> th(points_[j].data(), points_[j].size());
    const ChoiOperator one = channel.choi(th);
    const HermitianOperator power = kron_copies(one, copies);
    cache->powers.col(static_cast<Index>(j)) = vec(power.matrix());
    cache->cost_choi.push_back(channel.cost_choi(th));
  }
  HypothesisSet out = *this;
  out.cache_ = std::move(cache);
  return out;
}

const ChoiCache& HypothesisSet::cache() const {
  if (!cache_) fail("hypothesis set has no channel cache attached");
  return *cache_;
}

RMatrix HypothesisSet::probabilities(const TesterSet& testers) const {
  const ChoiCache& c = cache();
  if (!(testers.layout() == c.layout)) {
    fail("tester layout " + testers.layout().to_string() +
         " does not match cached layout " + c.layout.to_string());
  }
  // Tr(T J) = vec(T)^H vec(J) for Hermitian T.
  return (testers.vectorized().adjoint() * c.powers).real();
}

double HypothesisSet::effective_sample_size() const {
  return 1.0 / weights_.squaredNorm();
}

double haar_density_su2(std::span<const double> theta) {
  if (theta.size() != 3) fail("Haar density expects a 3-vector");
  const double r =
      std::sqrt(theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2]);
  if (r >= kPi) return 0.0;
  const double s = r < 1e-8 ? 1.0 - r * r / 6.0 : std::sin(r) / r;
  return s * s / (2.0 * kPi * kPi);
}

HypothesisSet haar_prior_su2(int n_points, SamplingMode mode,
                             std::uint64_t seed) {
  if (n_points < 1) fail("Haar prior needs n_points >= 1");
  const Domain ball{Domain::Shape::Ball, 0.0, kPi};
  std::vector<RVector> pts;
  pts.reserve(static_cast<std::size_t>(n_points));

  if (mode == SamplingMode::Importance) {
    Rng rng(derive_seed(seed, 0x4861617255ULL));
    for (int j = 0; j < n_points; ++j) {
      Quaternion q;
      double n = 0.0;
      do {
        for (auto& c : q.q) c = standard_normal(rng);
        n = q.norm();
      } while (n < 1e-12);
      for (auto& c : q.q) c /= n;
      pts.push_back(su2_parameters(q));
    }
    return HypothesisSet(std::move(pts), RVector::Ones(n_points),
                         SamplingMode::Importance, ball);
  }

  // Gauss-Legendre shells in r on [0, pi]; shell a carries the radial Haar
  // mass omega_a (2/pi) sin^2 r_a.  Points are split across shells in
  // proportion to mass and spread over each sphere on a Fibonacci lattice.
  const int n_r =
      std::max(1, static_cast<int>(std::lround(std::cbrt(n_points / 2.0))));
  const auto [nodes, gl_weights] = gauss_legendre(n_r, 0.0, kPi);
  std::vector<double> shell_mass(static_cast<std::size_t>(n_r));
  double total = 0.0;
  for (int a = 0; a < n_r; ++a) {
    const double sr = std::sin(nodes[static_cast<std::size_t>(a)]);
    shell_mass[static_cast<std::size_t>(a)] =
        gl_weights[static_cast<std::size_t>(a)] * 2.0 / kPi * sr * sr;
    total += shell_mass[static_cast<std::size_t>(a)];
  }
  // Largest-remainder allocation of n_points across shells.
  std::vector<int> count(static_cast<std::size_t>(n_r));
  std::vector<std::pair<double, int>> rem;
  int used = 0;
  for (int a = 0; a < n_r; ++a) {
    const double share = shell_mass[static_cast<std::size_t>(a)] / total * n_points;
    count[static_cast<std::size_t>(a)] = static_cast<int>(std::floor(share));
    used += count[static_cast<std::size_t>(a)];
    rem.emplace_back(share - std::floor(share), a);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (int i = 0; used < n_points; ++i, ++used) {
    ++count[static_cast<std::size_t>(rem[static_cast<std::size_t>(i)].second)];
  }

  const double golden = kPi * (3.0 - std::sqrt(5.0));
  RVector w(n_points);
  double raw = 0.0;
  Index j = 0;
  for (int a = 0; a < n_r; ++a) {
    const int c = count[static_cast<std::size_t>(a)];
    if (c == 0) continue;
    const double r = nodes[static_cast<std::size_t>(a)];
    raw += shell_mass[static_cast<std::size_t>(a)];
    for (int i = 0; i < c; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / c;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i + 1.0 * a;
      RVector p(3);
      p << r * rho * std::cos(phi), r * rho * std::sin(phi), r * z;
      w(j++) = shell_mass[static_cast<std::size_t>(a)] / c;
      pts.push_back(std::move(p));
    }
  }
  HypothesisSet out(std::move(pts), w, SamplingMode::Grid, ball);
  out.set_raw_mass(raw);
  return out;
}

HypothesisSet uniform_prior(double lo, double hi, int n_points) {
  if (!(hi > lo)) fail("uniform prior needs hi > lo");
  if (n_points < 1) fail("uniform prior needs n_points >= 1");
  std::vector<RVector> pts;
  for (int j = 0; j < n_points; ++j) {
    const double x = n_points == 1
                         ? 0.5 * (lo + hi)
                         : lo + (hi - lo) * j / static_cast<double>(n_points - 1);
    pts.push_back(RVector::Constant(1, x));
  }
  HypothesisSet out(std::move(pts), RVector::Ones(n_points), SamplingMode::Grid,
                    Domain{Domain::Shape::Interval, lo, hi});
  out.set_raw_mass(1.0);
  return out;
}

double sine_exp_density(double alpha, double lo, double hi, double x) {
  if (alpha == 0.0) fail("sine-exp prior is identically zero at alpha = 0");
  if (!(hi > lo)) fail("sine-exp prior needs theta_max > theta_min");
  if (x < lo || x > hi) return 0.0;
  const double s = std::sin(kPi * (x - lo) / (hi - lo));
  const double num = std::expm1(alpha * s * s);
  // e^{a/2} I0(a/2) - 1; I0 is even.
  const double norm =
      std::exp(alpha / 2.0) * std::cyl_bessel_i(0.0, std::abs(alpha) / 2.0) - 1.0;
  return num / ((hi - lo) * norm);
}

HypothesisSet sine_exp_prior(double alpha, double lo, double hi, int n_points) {
  if (alpha == 0.0) fail("sine-exp prior is identically zero at alpha = 0");
  if (!(hi > lo)) fail("sine-exp prior needs theta_max > theta_min");
  if (n_points < 1) fail("sine-exp prior needs n_points >= 1");
  const double dx = (hi - lo) / n_points;
  std::vector<RVector> pts;
  RVector w(n_points);
  double raw = 0.0;
  for (int j = 0; j < n_points; ++j) {
    const double x = lo + (j + 0.5) * dx;
    pts.push_back(RVector::Constant(1, x));
    w(j) = std::max(0.0, sine_exp_density(alpha, lo, hi, x));
    raw += w(j) * dx;
  }
  HypothesisSet out(std::move(pts), w, SamplingMode::Grid,
                    Domain{Domain::Shape::Interval, lo, hi});
  out.set_raw_mass(raw);
  return out;
}

RVector posterior_weights(const RVector& prior, const RMatrix& likelihood,
                          int outcome) {
  if (outcome < 0 || outcome >= likelihood.rows()) {
    fail("outcome index " + std::to_string(outcome) + " out of range");
  }
  RVector w =
      (prior.array() * likelihood.row(outcome).transpose().array().max(0.0))
          .matrix();
  const double n = w.sum();
  if (!(n > 1e-300)) {
    fail("posterior update: outcome " + std::to_string(outcome) +
         " has zero likelihood under every hypothesis");
  }
  return w / n;
}

HypothesisSet posterior_update(const HypothesisSet& h, const TesterSet& testers,
                               int outcome) {
  const RMatrix p = h.probabilities(testers);
  return h.with_weights(posterior_weights(h.weights(), p, outcome));
}

HypothesisSet resample(const HypothesisSet& h, double ess_threshold,
                       std::uint64_t seed, double jitter) {
  if (!(ess_threshold > 0.0 && ess_threshold <= 1.0)) {
    fail("ESS threshold must be in (0, 1]");
  }
  const auto n = static_cast<Index>(h.size());
  if (h.effective_sample_size() >= ess_threshold * static_cast<double>(n)) {
    return h;
  }
  Rng rng(derive_seed(seed, 0x5265736d706cULL));
  const RVector& w = h.weights();
  const int q = h.param_dim();

  // Weighted mean and std per coordinate.
  RVector mean = RVector::Zero(q);
  for (Index j = 0; j < n; ++j) mean += w(j) * h.point(static_cast<std::size_t>(j));
  RVector var = RVector::Zero(q);
  for (Index j = 0; j < n; ++j) {
    const RVector d = h.point(static_cast<std::size_t>(j)) - mean;
    var += w(j) * d.cwiseProduct(d);
  }
  const RVector bw = var.cwiseSqrt() * jitter;

  std::vector<RVector> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double step = 1.0 / static_cast<double>(n);
  double u = uniform01(rng) * step;
  double cum = w(0);
  Index j = 0;
  for (Index i = 0; i < n; ++i, u += step) {
    while (u > cum && j + 1 < n) cum += w(++j);
    RVector p = h.point(static_cast<std::size_t>(j));
    for (int c = 0; c < q; ++c) p(c) += bw(c) * standard_normal(rng);
    const Domain& dom = h.domain();
    if (dom.shape == Domain::Shape::Interval) {
      p = p.cwiseMax(dom.lo).cwiseMin(dom.hi);
    } else if (dom.shape == Domain::Shape::Ball) {
      const double r = p.norm();
      const double rmax = dom.hi * (1.0 - 1e-12);
      if (r > rmax) p *= rmax / r;
    }
    pts.push_back(std::move(p));
  }
  HypothesisSet out(std::move(pts), RVector::Ones(n), h.mode(), h.domain());
  if (h.has_cache()) {
    out = out.with_cache(*h.cache().channel, h.cache().copies);
  }
  return out;
}

void write_hypotheses_csv(std::ostream& os, const HypothesisSet& h) {
  os.precision(17);
  os << "j";
  for (int c = 0; c < h.param_dim(); ++c) os << ",theta_" << c;
  os << ",weight\n";
  for (std::size_t j = 0; j < h.size(); ++j) {
    os << j;
    for (int c = 0; c < h.param_dim(); ++c) os << "," << h.point(j)(c);
    os << "," << h.weights()(static_cast<Index>(j)) << "\n";
  }
}

}  // namespace bm
