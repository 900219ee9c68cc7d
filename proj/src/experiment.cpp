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

#include "bayesmetro/experiment.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bayesmetro/parallel.hpp"
#include "bayesmetro/realization.hpp"

namespace bm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_stamp(const char* fmt) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

template <class F>
void write_stream(const fs::path& path, F&& f) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  f(out);
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

/// JSON numbers cannot be NaN; map them to null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int class_rank(StrategyKind k) {
  switch (k) {
    case StrategyKind::Parallel:
      return 0;
    case StrategyKind::Sequential:
      return 1;
    case StrategyKind::General:
      return 2;
  }
  return 3;
}

json vector_json(const RVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

/// Round trip of the extracted implementation against Tr(T_i J^{(x)k}) on
/// up to 20 prior points.  Writes the JSON bundle when `path` is set.
double realization_check(const TesterSet& t, const ChannelModel& channel,
                         const HypothesisSet& h, const fs::path* path) {
  const StrategyClass& s = t.strategy();
  std::optional<ParallelRealization> par;
  std::optional<SequentialRealization> seq;
  std::optional<GeneralRealization> gen;
  if (s.kind == StrategyKind::Parallel) {
    par = realize_parallel(t);
  } else if (s.kind == StrategyKind::Sequential && s.copies == 2) {
    seq = realize_sequential_k2(t);
  } else if (s.kind == StrategyKind::General && s.copies == 2) {
    gen = realize_general(t);
  } else {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const std::size_t n = h.size();
  const std::size_t step = std::max<std::size_t>(1, n / 20);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; j += step) {
    const RVector& th = h.point(j);
    const std::span<const double> sp(th.data(), th.size());
    const HermitianOperator jk = kron_copies(channel.choi(sp), s.copies);
    RVector ref(static_cast<Index>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i) ref(static_cast<Index>(i)) = inner(t[i], jk);
    RVector got;
    if (par) got = realized_probabilities(*par, channel.kraus(sp));
    if (seq) got = realized_probabilities(*seq, channel.kraus(sp));
    if (gen) got = realized_probabilities(*gen, jk.matrix());
    worst = std::max(worst, (got - ref).cwiseAbs().maxCoeff());
  }
  if (path) {
    write_stream(*path, [&](std::ostream& os) {
      if (par) write_realization_json(os, *par);
      if (seq) write_realization_json(os, *seq);
      if (gen) write_realization_json(os, *gen);
    });
  }
  return worst;
}

SeesawConfig seesaw_config(const ExperimentConfig& cfg) {
  SeesawConfig sc;
  sc.epsilon = cfg.seesaw.epsilon;
  sc.max_iters = cfg.seesaw.max_iters;
  sc.restarts = cfg.seesaw.restarts;
  sc.seed = cfg.seed;
  sc.outcomes = effective_outcomes(cfg);
  sc.workers = cfg.workers;
  sc.solver.tolerance = cfg.solver.tolerance;
  sc.solver.max_iterations = cfg.solver.max_iterations;
  sc.solver.backend = cfg.solver.backend;
  return sc;
}

double density_mode(const std::function<double(double)>& f, double lo, double hi) {
  const int n = 100000;
  double best = lo, fb = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double v = f(x);
    if (v > fb) {
      fb = v;
      best = x;
    }
  }
  return best;
}

json class_json(const ClassResult& c, const CostKernel& kernel) {
  json j = {{"class", to_string(c.kind)},
            {"copies", c.copies},
            {"status", c.ok ? "ok" : "failed"},
            {"seconds", c.seconds}};
  if (!c.ok) {
    j["error"] = c.error;
    return j;
  }
  const SeesawResult& r = c.seesaw;
  j["score"] = r.score;
  if (c.analytic) j["analytic"] = *c.analytic;
  j["converged"] = r.converged;
  j["iterations"] = r.trace.size();
  j["restart"] = r.restart;
  json rs = json::array();
  for (const auto& rec : r.restarts) {
    rs.push_back({{"score", rec.score},
                  {"warm", rec.warm},
                  {"converged", rec.converged},
                  {"iterations", rec.trace.size()},
                  {"rejected_updates", rec.rejected}});
  }
  j["restarts"] = rs;
  j["sdp_solves"] = r.sdp_solves;
  j["worst_regression"] = c.worst_regression;
  j["monotone"] = c.worst_regression <= 1e-9;
  j["rejected_step"] = worst_rejected_step(r);
  j["realization_roundtrip_error"] = number(c.realization_error);
  j["sdp"] = {{"status", sdp::to_string(r.diagnostics.status)},
              {"iterations", r.diagnostics.iterations},
              {"primal_residual", r.diagnostics.primal_residual},
              {"dual_residual", r.diagnostics.dual_residual},
              {"gap", r.diagnostics.gap},
              {"constraints", r.diagnostics.constraints}};
  json est = json::array();
  for (const auto& e : r.estimators.estimates) est.push_back(vector_json(e));
  j["estimators"] = est;
  j["sense"] = kernel.maximize() ? "maximize" : "minimize";
  return j;
}

json base_report(const ExperimentConfig& cfg, const char* kind) {
  return {{"schema_version", kReportSchemaVersion},
          {"kind", kind},
          {"name", cfg.name},
          {"version", kVersion},
          {"seed", cfg.seed},
          {"cost", to_string(make_cost(cfg).kind)},
          {"channel", make_channel(cfg).describe()}};
}

}  // namespace

OptimizeOutcome optimize(const ExperimentConfig& cfg, const fs::path* dir) {
  validate(cfg);
  const ChannelModel channel = make_channel(cfg);
  const CostKernel kernel = make_cost(cfg);
  const HypothesisSet prior = make_prior(cfg);
  const HypothesisSet h = prior.with_cache(channel, cfg.copies);

  std::vector<StrategyKind> order = cfg.classes;
  std::stable_sort(order.begin(), order.end(), [](StrategyKind a, StrategyKind b) {
    return class_rank(a) < class_rank(b);
  });

  OptimizeOutcome out;
  std::vector<EstimatorSet> warm;
  const bool su2_exact = cfg.channel.kind == "su2" && !cfg.channel.noise &&
                         make_cost(cfg).kind == CostKind::FidelitySu2;
  for (StrategyKind kind : order) {
    ClassResult cr;
    cr.kind = kind;
    cr.copies = cfg.copies;
    const auto t0 = Clock::now();
    SeesawConfig sc = seesaw_config(cfg);
    if (cfg.seesaw.nested_warm_start) sc.warm_starts = warm;
    SeesawProblem problem{StrategyClass{kind, cfg.copies}, &h, kernel};
    try {
      cr.seesaw = run_seesaw(problem, sc);
      cr.ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Solver) throw;
      cr.error = e.what();
      out.solver_failed = true;
    }
    cr.seconds = seconds_since(t0);
    if (cr.ok) {
      warm.push_back(cr.seesaw.estimators);
      cr.worst_regression = worst_regression(cr.seesaw, kernel.maximize());
      if (su2_exact) cr.analytic = analytic_su2_score(cfg.copies);
      const std::string stem = to_string(kind);
      if (dir && cfg.output.trace_csv) {
        write_stream(*dir / ("trace_" + stem + ".csv"),
                     [&](std::ostream& os) { write_trace_csv(os, cr.seesaw); });
      }
      try {
        const fs::path rpath = dir ? *dir / ("realization_" + stem + ".json") : fs::path();
        cr.realization_error = realization_check(
            cr.seesaw.testers, channel, h,
            dir && cfg.output.realizations ? &rpath : nullptr);
      } catch (const Error& e) {
        warn(std::string("realization of the ") + stem + " tester failed: " + e.what());
      }
      if (dir && cfg.output.dump_sdp) {
        const RMatrix table = cost_table(kernel, h.points(), cr.seesaw.estimators);
        const auto obj = build_objective(h.cache().powers, h.weights(), table,
                                         h.cache().layout.total_dim());
        const auto prob = assemble_tester_problem(
            constraints_for(problem.strategy, channel.d_in(), channel.d_out()), obj,
            kernel.sense());
        write_stream(*dir / ("sdp_" + stem + ".txt"),
                     [&](std::ostream& os) { sdp::write_triplets(os, prob); });
      }
    }
    out.classes.push_back(std::move(cr));
  }

  // Analytic cross-checks.
  bool any_analysis = false;
  if (cfg.analysis.su2_analytic) {
    any_analysis = true;
    for (int k = 1; k <= cfg.copies; ++k) {
      out.analysis.su2_scores.emplace_back(k, analytic_su2_score(k));
    }
  }
  if (cfg.analysis.beta_scan) {
    any_analysis = true;
    out.analysis.beta = scan_thermometry_beta(cfg.prior.lo, cfg.prior.hi, 0.1, 5.0, 5,
                                              cfg.channel.energy,
                                              cfg.channel.spectral_density);
  }
  if (cfg.analysis.van_trees) {
    any_analysis = true;
    const auto& p = cfg.prior;
    const auto density = [&](double x) {
      return sine_exp_density(p.alpha, p.lo, p.hi, x);
    };
    const double f0 = prior_fisher_info(density, p.lo, p.hi);
    const double theta0 = density_mode(density, p.lo, p.hi);
    for (const auto& c : out.classes) {
      if (!c.ok) continue;
      out.analysis.van_trees.emplace_back(
          to_string(c.kind),
          van_trees_check(c.seesaw.testers, channel, theta0, f0, c.seesaw.score));
    }
  }

  if (dir) {
    json rep = base_report(cfg, "optimize");
    rep["copies"] = cfg.copies;
    rep["outcomes"] = effective_outcomes(cfg);
    rep["prior"] = {{"kind", cfg.prior.kind},
                    {"points", prior.size()},
                    {"raw_mass", number(prior.raw_mass())}};
    json results = json::array();
    for (const auto& c : out.classes) results.push_back(class_json(c, kernel));
    rep["results"] = results;
    rep["solver_failed"] = out.solver_failed;
    if (any_analysis) {
      write_stream(*dir / "analysis.json",
                   [&](std::ostream& os) { write_analysis_json(os, out.analysis); });
      rep["analysis"] = "analysis.json";
    }
    if (cfg.output.hypotheses_csv) {
      write_stream(*dir / "hypotheses.csv",
                   [&](std::ostream& os) { write_hypotheses_csv(os, prior); });
    }
    write_file(*dir / "report.json", rep.dump(2) + "\n");
  }
  return out;
}

GreedyOutcome greedy(const ExperimentConfig& cfg, const fs::path* dir) {
  validate(cfg);
  const ChannelModel channel = make_channel(cfg);
  const CostKernel kernel = make_cost(cfg);
  const HypothesisSet h =
      make_prior(cfg).with_cache(channel, cfg.greedy.batch);

  GreedyConfig g;
  g.trajectories = cfg.greedy.trajectories;
  g.rounds = cfg.greedy.rounds;
  g.batch = cfg.greedy.batch;
  g.inner = cfg.greedy.inner;
  g.seed = cfg.seed;
  g.workers = cfg.workers;
  g.seesaw = seesaw_config(cfg);
  g.seesaw.outcomes = effective_greedy_outcomes(cfg);
  g.seesaw.restarts = cfg.greedy.restarts;
  g.seesaw.max_iters = cfg.greedy.max_iters;
  g.resample = cfg.greedy.resample;
  GreedyProblem problem{&h, kernel};

  GreedyOutcome out;
  json modes = json::array();
  auto write_report = [&] {
    if (!dir) return;
    json rep = base_report(cfg, "greedy");
    rep["batch"] = g.batch;
    rep["inner"] = to_string(g.inner);
    rep["outcomes"] = g.seesaw.outcomes;
    rep["modes"] = modes;
    if (!out.paired_mean.empty()) {
      json pr = json::array();
      for (std::size_t c = 0; c < out.paired_mean.size(); ++c) {
        pr.push_back({{"round", c + 1},
                      {"mean_difference", out.paired_mean[c]},
                      {"stderr", out.paired_stderr[c]}});
      }
      rep["paired_difference"] = pr;
    }
    write_file(*dir / "greedy_report.json", rep.dump(2) + "\n");
    write_stream(*dir / "greedy_long.csv", [&](std::ostream& os) {
      os.precision(17);
      os << "value,class,score,stderr\n";
      for (const auto& m : out.modes) {
        for (std::size_t c = 0; c < m.report.mean.size(); ++c) {
          os << c + 1 << "," << m.mode << "," << m.report.mean[c] << ","
             << m.report.stderr_[c] << "\n";
        }
      }
    });
  };

  for (bool adaptive : {true, false}) {
    if (adaptive ? !cfg.greedy.adaptive : !cfg.greedy.non_adaptive) continue;
    g.adaptive = adaptive;
    GreedyMode m;
    m.mode = adaptive ? "greedy" : "non_adaptive";
    const auto t0 = Clock::now();
    m.report = run_greedy(problem, g);
    m.seconds = seconds_since(t0);
    if (dir) {
      write_stream(*dir / ("rounds_" + m.mode + ".csv"),
                   [&](std::ostream& os) { write_rounds_csv(os, m.report); });
    }
    json rounds = json::array();
    for (std::size_t c = 0; c < m.report.mean.size(); ++c) {
      rounds.push_back({{"round", c + 1},
                        {"mean", m.report.mean[c]},
                        {"stderr", m.report.stderr_[c]},
                        {"expected", m.report.expected_mean[c]},
                        {"expected_stderr", m.report.expected_stderr[c]}});
    }
    modes.push_back({{"mode", m.mode},
                     {"rounds", rounds},
                     {"trajectories", m.report.trajectories},
                     {"aborted", m.report.aborted},
                     {"seesaw_runs", m.report.seesaw_runs},
                     {"cache_hits", m.report.cache_hits},
                     {"seconds", m.seconds},
                     {"sdp_solves", m.report.sdp_solves},
                     {"worst_regression", m.report.worst_regression},
                     {"rejected_step", m.report.rejected_step},
                     {"rejected_updates", m.report.rejected_updates}});
    out.modes.push_back(std::move(m));
    write_report();
  }

  if (out.modes.size() == 2) {
    const RMatrix& a = out.modes[0].report.scores;
    const RMatrix& b = out.modes[1].report.scores;
    for (Index c = 0; c < a.cols(); ++c) {
      double s = 0.0, s2 = 0.0;
      int n = 0;
      for (Index l = 0; l < a.rows(); ++l) {
        if (std::isnan(a(l, c)) || std::isnan(b(l, c))) continue;
        const double d = a(l, c) - b(l, c);
        s += d;
        s2 += d * d;
        ++n;
      }
      const double mean = n ? s / n : 0.0;
      const double var = n > 1 ? (s2 - n * mean * mean) / (n - 1) : 0.0;
      out.paired_mean.push_back(mean);
      out.paired_stderr.push_back(n ? std::sqrt(std::max(0.0, var) / n) : 0.0);
    }
    write_report();
  }
  return out;
}

SweepOutcome sweep(const ExperimentConfig& cfg, const fs::path* dir) {
  validate(cfg);
  if (!cfg.sweep) throw Error(ErrorKind::Config, "sweep: no [sweep] table");
  const SweepSection& s = *cfg.sweep;
  if (s.values.empty()) throw Error(ErrorKind::Config, "sweep.values: must not be empty");

  const std::size_t n = s.values.size();
  std::vector<std::vector<SweepRow>> rows(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const double v = s.values[i];
    auto fail_row = [&](const std::string& cls, const std::string& msg) {
      SweepRow r;
      r.value = v;
      r.cls = cls;
      r.error = msg;
      rows[i].push_back(r);
    };
    ExperimentConfig c = cfg;
    c.workers = 1;
    c.sweep.reset();
    try {
      set_parameter(c, s.parameter, v);
    } catch (const Error& e) {
      errors[i] = e.what();
      fail_row("all", e.what());
      return;
    }
    fs::path pdir;
    if (dir) {
      pdir = *dir / ("point_" + std::to_string(i));
      fs::create_directories(pdir);
    }
    try {
      const OptimizeOutcome o = optimize(c, dir ? &pdir : nullptr);
      for (const auto& cr : o.classes) {
        SweepRow r;
        r.value = v;
        r.cls = to_string(cr.kind);
        if (cr.ok) {
          r.score = cr.seesaw.score;
        } else {
          r.error = cr.error;
          errors[i] = cr.error;
        }
        rows[i].push_back(r);
      }
    } catch (const Error& e) {
      errors[i] = e.what();
      fail_row("optimize", e.what());
    }
    if (s.include_greedy) {
      try {
        const GreedyOutcome g = greedy(c, dir ? &pdir : nullptr);
        for (const auto& m : g.modes) {
          SweepRow r;
          r.value = v;
          r.cls = m.mode;
          r.score = m.report.mean.back();
          r.stderr_ = m.report.stderr_.back();
          rows[i].push_back(r);
        }
      } catch (const Error& e) {
        errors[i] = e.what();
        fail_row("greedy", e.what());
      }
    }
  });

  SweepOutcome out;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& r : rows[i]) out.rows.push_back(r);
    if (!errors[i].empty()) ++out.failures;
  }
  if (dir) {
    write_stream(*dir / "sweep.csv", [&](std::ostream& os) {
      os.precision(17);
      os << "value,class,score,stderr\n";
      for (const auto& r : out.rows) {
        os << r.value << "," << r.cls << ",";
        if (std::isfinite(r.score)) {
          os << r.score;
        } else {
          os << "nan";
        }
        os << "," << r.stderr_ << "\n";
      }
    });
    json rep = base_report(cfg, "sweep");
    rep["parameter"] = s.parameter;
    rep["values"] = s.values;
    json pts = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json cls = json::array();
      for (const auto& r : rows[i]) {
        json e = {{"class", r.cls}, {"score", number(r.score)}, {"stderr", r.stderr_}};
        if (!r.error.empty()) e["error"] = r.error;
        cls.push_back(e);
      }
      json p = {{"index", i}, {"value", s.values[i]}, {"dir", "point_" + std::to_string(i)},
                {"results", cls}};
      if (!errors[i].empty()) p["error"] = errors[i];
      pts.push_back(p);
    }
    rep["points"] = pts;
    rep["failures"] = out.failures;
    write_file(*dir / "sweep_report.json", rep.dump(2) + "\n");
  }
  return out;
}

const char* to_string(Command c) {
  switch (c) {
    case Command::Optimize:
      return "optimize";
    case Command::Greedy:
      return "greedy";
    case Command::Sweep:
      return "sweep";
  }
  return "unknown";
}

fs::path create_run_directory(const fs::path& root, const std::string& name,
                              const std::string& command) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + root.string() + "': " + ec.message());
  const std::string base = name + "-" + command + "-" + utc_stamp("%Y%m%dT%H%M%SZ");
  fs::path dir = root / base;
  for (int i = 2; fs::exists(dir); ++i) dir = root / (base + "-" + std::to_string(i));
  fs::create_directory(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());

  const fs::path link = root / "latest";
  const fs::path tmp = root / (".latest-" + dir.filename().string());
  fs::remove(tmp, ec);
  fs::create_directory_symlink(dir.filename(), tmp, ec);
  if (!ec) fs::rename(tmp, link, ec);
  if (ec) {
    fs::remove(tmp, ec);
    warn("could not update '" + link.string() + "'");
  }
  return dir;
}

namespace {

void write_manifest(const fs::path& dir, Command command, const ExperimentConfig& cfg,
                    const std::string& source, const std::string& text,
                    const std::string& started, const std::string& status,
                    const std::string& error) {
  json m;
  m["schema_version"] = kReportSchemaVersion;
  m["command"] = to_string(command);
  m["status"] = status;
  if (!error.empty()) m["error"] = error;
  m["started"] = started;
  if (status != "running") m["finished"] = utc_stamp("%Y-%m-%dT%H:%M:%SZ");
  m["seed"] = cfg.seed;
  m["config_source"] = source;
  m["config_text"] = text;
  m["config"] = json::parse(config_to_json(cfg));
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  m["versions"] = {{"bayesmetro", kVersion},
                   {"eigen", eigen.str()},
                   {"compiler", __VERSION__},
                   {"toml", toml_library_version()},
                   {"json", json_library_version()},
                   {"sdp_solver", "built-in primal-dual interior point (HKM direction)"},
                   {"sdp_backend", cfg.solver.backend == sdp::Backend::Complex
                                       ? "complex"
                                       : "real"}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

RunResult run_command(Command command, const ExperimentConfig& cfg,
                      const std::string& config_source,
                      const std::string& config_text) {
  RunResult res;
  try {
    validate(cfg);
    res.dir = create_run_directory(cfg.output.root, cfg.name, to_string(command));
  } catch (const Error& e) {
    res.exit_code = e.kind() == ErrorKind::Config ? 2 : 1;
    res.error = e.what();
    return res;
  }
  const std::string started = utc_stamp("%Y-%m-%dT%H:%M:%SZ");
  std::string status = "ok";
  json summary = {{"command", to_string(command)}, {"dir", res.dir.string()}};
  try {
    write_manifest(res.dir, command, cfg, config_source, config_text, started,
                   "running", "");
    switch (command) {
      case Command::Optimize: {
        const OptimizeOutcome o = optimize(cfg, &res.dir);
        json s = json::array();
        for (const auto& c : o.classes) {
          json e = {{"class", to_string(c.kind)}, {"ok", c.ok}};
          if (c.ok) {
            e["score"] = c.seesaw.score;
          } else {
            e["error"] = c.error;
          }
          s.push_back(e);
        }
        summary["results"] = s;
        if (o.solver_failed) {
          res.exit_code = 3;
          status = "solver_failure";
          res.error = "at least one strategy class failed in the SDP solver";
        }
        break;
      }
      case Command::Greedy: {
        const GreedyOutcome g = greedy(cfg, &res.dir);
        json s = json::array();
        for (const auto& m : g.modes) {
          s.push_back({{"mode", m.mode}, {"mean", m.report.mean}, {"stderr", m.report.stderr_}});
        }
        summary["results"] = s;
        break;
      }
      case Command::Sweep: {
        const SweepOutcome s = sweep(cfg, &res.dir);
        summary["rows"] = s.rows.size();
        summary["failures"] = s.failures;
        if (s.failures > 0) {
          res.exit_code = 3;
          status = "partial";
          res.error = std::to_string(s.failures) + " sweep point(s) failed";
        }
        break;
      }
    }
  } catch (const Error& e) {
    res.error = e.what();
    switch (e.kind()) {
      case ErrorKind::Config:
        res.exit_code = 2;
        status = "config_error";
        break;
      case ErrorKind::Solver:
        res.exit_code = 3;
        status = "solver_failure";
        break;
      default:
        res.exit_code = 1;
        status = "failed";
    }
  } catch (const std::exception& e) {
    res.error = e.what();
    res.exit_code = 1;
    status = "failed";
  }
  try {
    write_manifest(res.dir, command, cfg, config_source, config_text, started, status,
                   res.error);
  } catch (const Error& e) {
    if (res.exit_code == 0) {
      res.exit_code = 1;
      res.error = e.what();
    }
  }
  summary["status"] = status;
  if (!res.error.empty()) summary["error"] = res.error;
  res.summary = summary.dump();
  return res;
}

}  // namespace bm
