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

#include "bayesmetro/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace bm {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::Config, msg);
}

json toml_to_json(const toml::node& node, const std::string& path) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      out[key] = toml_to_json(v, path.empty() ? key : path + "." + key);
    }
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v, path));
    return out;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  config_error(path + ": dates and times are not supported");
}

/// Typed access to one table with unknown-key detection.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(where() + "expected a table");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    read(j_.at(key), name(key), out);
  }

  Reader table(const std::string& key) {
    seen_.insert(key);
    return Reader(j_.at(key), name(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) config_error("unknown key '" + name(k) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  static void read(const json& v, const std::string& n, double& out) {
    if (!v.is_number()) config_error(n + ": expected a number");
    out = v.get<double>();
  }
  static void read(const json& v, const std::string& n, int& out) {
    if (!v.is_number_integer()) config_error(n + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < -2147483647LL || x > 2147483647LL) config_error(n + ": out of range");
    out = static_cast<int>(x);
  }
  static void read(const json& v, const std::string& n, std::uint64_t& out) {
    if (!v.is_number_integer()) config_error(n + ": expected an integer");
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
      return;
    }
    const auto x = v.get<long long>();
    if (x < 0) config_error(n + ": must be non-negative");
    out = static_cast<std::uint64_t>(x);
  }
  static void read(const json& v, const std::string& n, bool& out) {
    if (!v.is_boolean()) config_error(n + ": expected true or false");
    out = v.get<bool>();
  }
  static void read(const json& v, const std::string& n, std::string& out) {
    if (!v.is_string()) config_error(n + ": expected a string");
    out = v.get<std::string>();
  }
  static void read(const json& v, const std::string& n,
                   std::vector<std::string>& out) {
    if (!v.is_array()) config_error(n + ": expected an array of strings");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_string()) config_error(n + ": expected an array of strings");
      out.push_back(e.get<std::string>());
    }
  }
  static void read(const json& v, const std::string& n,
                   std::vector<double>& out) {
    if (!v.is_array()) config_error(n + ": expected an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) config_error(n + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

StrategyKind strategy_field(const std::string& field, const std::string& v) {
  try {
    return parse_strategy(v);
  } catch (const Error&) {
    config_error(field + ": unknown strategy class '" + v +
                 "' (parallel, sequential, general)");
  }
}

const char* backend_name(sdp::Backend b) {
  return b == sdp::Backend::Complex ? "complex" : "real";
}

ExperimentConfig from_tree(const json& root) {
  ExperimentConfig c;
  Reader r(root, "");
  r.get("schema_version", c.schema_version);
  r.get("name", c.name);
  r.get("seed", c.seed);
  r.get("workers", c.workers);
  r.get("cost", c.cost);

  if (r.has("channel")) {
    Reader t = r.table("channel");
    t.get("kind", c.channel.kind);
    t.get("time", c.channel.time);
    t.get("energy", c.channel.energy);
    t.get("spectral_density", c.channel.spectral_density);
    if (t.has("noise")) {
      Reader nz = t.table("noise");
      NoiseConfig n;
      nz.get("kind", n.kind);
      nz.get("p", n.p);
      nz.finish();
      c.channel.noise = n;
    }
    t.finish();
  }
  if (r.has("prior")) {
    Reader t = r.table("prior");
    t.get("kind", c.prior.kind);
    t.get("points", c.prior.points);
    std::string sampling = "grid";
    t.get("sampling", sampling);
    if (sampling == "grid") {
      c.prior.sampling = SamplingMode::Grid;
    } else if (sampling == "importance") {
      c.prior.sampling = SamplingMode::Importance;
    } else {
      config_error("prior.sampling: expected \"grid\" or \"importance\"");
    }
    t.get("lo", c.prior.lo);
    t.get("hi", c.prior.hi);
    t.get("alpha", c.prior.alpha);
    t.finish();
  }
  if (r.has("strategy")) {
    Reader t = r.table("strategy");
    std::vector<std::string> classes;
    if (t.has("classes")) {
      t.get("classes", classes);
      c.classes.clear();
      for (const auto& s : classes) {
        c.classes.push_back(strategy_field("strategy.classes", s));
      }
    }
    t.get("copies", c.copies);
    t.finish();
  }
  if (r.has("seesaw")) {
    Reader t = r.table("seesaw");
    t.get("epsilon", c.seesaw.epsilon);
    t.get("max_iters", c.seesaw.max_iters);
    t.get("restarts", c.seesaw.restarts);
    t.get("outcomes", c.seesaw.outcomes);
    t.get("nested_warm_start", c.seesaw.nested_warm_start);
    t.finish();
  }
  if (r.has("solver")) {
    Reader t = r.table("solver");
    t.get("tolerance", c.solver.tolerance);
    t.get("max_iterations", c.solver.max_iterations);
    std::string backend = backend_name(c.solver.backend);
    t.get("backend", backend);
    if (backend == "complex") {
      c.solver.backend = sdp::Backend::Complex;
    } else if (backend == "real") {
      c.solver.backend = sdp::Backend::RealEmbedding;
    } else {
      config_error("solver.backend: expected \"complex\" or \"real\"");
    }
    t.finish();
  }
  if (r.has("greedy")) {
    Reader t = r.table("greedy");
    GreedySection& g = c.greedy;
    t.get("trajectories", g.trajectories);
    t.get("rounds", g.rounds);
    t.get("batch", g.batch);
    std::string inner = to_string(g.inner);
    t.get("inner", inner);
    g.inner = strategy_field("greedy.inner", inner);
    t.get("adaptive", g.adaptive);
    t.get("non_adaptive", g.non_adaptive);
    t.get("outcomes", g.outcomes);
    t.get("restarts", g.restarts);
    t.get("max_iters", g.max_iters);
    if (t.has("resample")) {
      Reader rs = t.table("resample");
      rs.get("enabled", g.resample.enabled);
      rs.get("ess_threshold", g.resample.ess_threshold);
      rs.get("jitter", g.resample.jitter);
      rs.finish();
    }
    t.finish();
  }
  if (r.has("sweep")) {
    Reader t = r.table("sweep");
    SweepSection s;
    t.get("parameter", s.parameter);
    t.get("values", s.values);
    t.get("include_greedy", s.include_greedy);
    t.finish();
    c.sweep = s;
  }
  if (r.has("analysis")) {
    Reader t = r.table("analysis");
    t.get("van_trees", c.analysis.van_trees);
    t.get("beta_scan", c.analysis.beta_scan);
    t.get("su2_analytic", c.analysis.su2_analytic);
    t.finish();
  }
  if (r.has("output")) {
    Reader t = r.table("output");
    t.get("root", c.output.root);
    t.get("trace_csv", c.output.trace_csv);
    t.get("realizations", c.output.realizations);
    t.get("dump_sdp", c.output.dump_sdp);
    t.get("hypotheses_csv", c.output.hypotheses_csv);
    t.finish();
  }
  r.finish();
  validate(c);
  return c;
}

bool one_dimensional(const std::string& channel) {
  return channel == "phase" || channel == "thermometry";
}

std::string canonical_parameter(const std::string& name) {
  if (name == "p" || name == "channel.noise.p") return "channel.noise.p";
  if (name == "t" || name == "time" || name == "channel.time") return "channel.time";
  if (name == "alpha" || name == "prior.alpha") return "prior.alpha";
  if (name == "prior.points") return "prior.points";
  if (name == "seesaw.outcomes") return "seesaw.outcomes";
  if (name == "k" || name == "strategy.copies") return "strategy.copies";
  return "";
}

}  // namespace

void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) config_error(msg);
  };
  need(c.schema_version == kConfigSchemaVersion,
       "schema_version: only version " + std::to_string(kConfigSchemaVersion) +
           " is supported");
  need(!c.name.empty(), "name: must not be empty");
  need(c.workers >= 1, "workers: must be >= 1");

  const auto& ch = c.channel;
  need(ch.kind == "su2" || ch.kind == "phase" || ch.kind == "thermometry",
       "channel.kind: expected \"su2\", \"phase\" or \"thermometry\"");
  need(std::isfinite(ch.time), "channel.time: must be finite");
  if (ch.kind == "thermometry") {
    need(ch.time >= 0.0, "channel.time: must be >= 0 for thermometry");
    need(ch.energy > 0.0, "channel.energy: must be > 0");
    need(ch.spectral_density > 0.0, "channel.spectral_density: must be > 0");
  }
  if (ch.noise) {
    need(ch.noise->kind == "amplitude_damping",
         "channel.noise.kind: only \"amplitude_damping\" is supported");
    need(ch.noise->p >= 0.0 && ch.noise->p <= 1.0,
         "channel.noise.p: must be in [0, 1]");
    need(ch.kind != "thermometry",
         "channel.noise: not supported on the thermometry channel");
  }

  const auto& pr = c.prior;
  need(pr.kind == "haar_su2" || pr.kind == "uniform" || pr.kind == "sine_exp",
       "prior.kind: expected \"haar_su2\", \"uniform\" or \"sine_exp\"");
  need(pr.points >= 1, "prior.points: must be >= 1");
  if (ch.kind == "su2") {
    need(pr.kind == "haar_su2", "prior.kind: the su2 channel needs \"haar_su2\"");
  } else {
    need(pr.kind != "haar_su2",
         "prior.kind: \"haar_su2\" needs the su2 channel");
    need(pr.hi > pr.lo, "prior.hi: must exceed prior.lo");
    need(pr.sampling == SamplingMode::Grid,
         "prior.sampling: importance sampling is only available for haar_su2");
  }
  if (pr.kind == "sine_exp") need(pr.alpha != 0.0, "prior.alpha: must be nonzero");
  if (ch.kind == "thermometry") {
    need(pr.lo > 0.0, "prior.lo: temperatures must be positive");
  }

  CostKind cost;
  try {
    cost = make_cost(c).kind;
  } catch (const Error& e) {
    config_error(std::string("cost: ") + e.what());
  }
  if (cost == CostKind::FidelitySu2) {
    need(ch.kind == "su2", "cost: fidelity_su2 needs the su2 channel");
  } else {
    need(one_dimensional(ch.kind), "cost: " + std::string(to_string(cost)) +
                                       " needs a one-parameter channel");
  }
  if (cost == CostKind::RelativeMse) {
    need(pr.lo > 0.0, "cost: relative_mse needs a prior with lo > 0");
  }

  need(!c.classes.empty(), "strategy.classes: must not be empty");
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      need(c.classes[i] != c.classes[j], "strategy.classes: duplicate entry");
    }
  }
  need(c.copies >= 1, "strategy.copies: must be >= 1");
  for (auto k : c.classes) {
    if (k == StrategyKind::General) {
      need(c.copies <= 2, "strategy.copies: the general class supports k <= 2");
    }
  }

  need(c.seesaw.epsilon > 0.0, "seesaw.epsilon: must be > 0");
  need(c.seesaw.max_iters >= 1, "seesaw.max_iters: must be >= 1");
  need(c.seesaw.restarts >= 0, "seesaw.restarts: must be >= 0");
  need(c.seesaw.outcomes >= 0, "seesaw.outcomes: must be >= 0");
  need(c.solver.tolerance > 0.0, "solver.tolerance: must be > 0");
  need(c.solver.max_iterations >= 1, "solver.max_iterations: must be >= 1");

  const auto& g = c.greedy;
  need(g.trajectories >= 1, "greedy.trajectories: must be >= 1");
  need(g.rounds >= 1, "greedy.rounds: must be >= 1");
  need(g.batch >= 1, "greedy.batch: must be >= 1");
  need(g.adaptive || g.non_adaptive,
       "greedy: at least one of adaptive / non_adaptive must be true");
  if (g.inner == StrategyKind::General) {
    need(g.batch <= 2, "greedy.batch: the general class supports m <= 2");
  }
  need(g.outcomes >= 0, "greedy.outcomes: must be >= 0");
  need(g.restarts >= 0, "greedy.restarts: must be >= 0");
  need(g.max_iters >= 1, "greedy.max_iters: must be >= 1");
  need(g.resample.ess_threshold > 0.0 && g.resample.ess_threshold <= 1.0,
       "greedy.resample.ess_threshold: must be in (0, 1]");
  need(g.resample.jitter >= 0.0, "greedy.resample.jitter: must be >= 0");

  if (c.sweep) {
    need(!canonical_parameter(c.sweep->parameter).empty(),
         "sweep.parameter: unknown parameter '" + c.sweep->parameter + "'");
    need(!c.sweep->values.empty(), "sweep.values: must not be empty");
    if (canonical_parameter(c.sweep->parameter) == "channel.noise.p") {
      need(c.channel.noise.has_value(),
           "sweep.parameter: channel.noise.p needs a [channel.noise] table");
    }
  }

  if (c.analysis.van_trees) {
    need(pr.kind == "sine_exp",
         "analysis.van_trees: needs a sine_exp prior (smooth density)");
    need(cost == CostKind::CosSquared,
         "analysis.van_trees: needs the cos_squared cost");
  }
  if (c.analysis.beta_scan) {
    need(ch.kind == "thermometry", "analysis.beta_scan: needs the thermometry channel");
  }
  if (c.analysis.su2_analytic) {
    need(ch.kind == "su2" && !ch.noise,
         "analysis.su2_analytic: needs the noiseless su2 channel");
  }
  need(!c.output.root.empty(), "output.root: must not be empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  toml::table tbl;
  try {
    tbl = toml::parse(text, std::string_view(source));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":"
        << e.source().begin.column << ": " << e.description();
    config_error(msg.str());
  }
  return from_tree(toml_to_json(tbl, ""));
}

std::string toml_library_version() {
  return std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) + "." +
         std::to_string(TOML_LIB_PATCH);
}

std::string json_library_version() {
  return std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("command")) {
    return from_tree(j.at("config"));
  }
  return from_tree(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return config_from_json(text);
  }
  return parse_config(text, path);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["cost"] = to_string(make_cost(c).kind);
  json ch = {{"kind", c.channel.kind},
             {"time", c.channel.time},
             {"energy", c.channel.energy},
             {"spectral_density", c.channel.spectral_density}};
  if (c.channel.noise) {
    ch["noise"] = {{"kind", c.channel.noise->kind}, {"p", c.channel.noise->p}};
  }
  j["channel"] = ch;
  j["prior"] = {{"kind", c.prior.kind},
                {"points", c.prior.points},
                {"sampling", c.prior.sampling == SamplingMode::Grid ? "grid"
                                                                    : "importance"},
                {"lo", c.prior.lo},
                {"hi", c.prior.hi},
                {"alpha", c.prior.alpha}};
  json classes = json::array();
  for (auto k : c.classes) classes.push_back(to_string(k));
  j["strategy"] = {{"classes", classes}, {"copies", c.copies}};
  j["seesaw"] = {{"epsilon", c.seesaw.epsilon},
                 {"max_iters", c.seesaw.max_iters},
                 {"restarts", c.seesaw.restarts},
                 {"outcomes", effective_outcomes(c)},
                 {"nested_warm_start", c.seesaw.nested_warm_start}};
  j["solver"] = {{"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations},
                 {"backend", backend_name(c.solver.backend)}};
  const auto& g = c.greedy;
  j["greedy"] = {{"trajectories", g.trajectories},
                 {"rounds", g.rounds},
                 {"batch", g.batch},
                 {"inner", to_string(g.inner)},
                 {"adaptive", g.adaptive},
                 {"non_adaptive", g.non_adaptive},
                 {"outcomes", effective_greedy_outcomes(c)},
                 {"restarts", g.restarts},
                 {"max_iters", g.max_iters},
                 {"resample",
                  {{"enabled", g.resample.enabled},
                   {"ess_threshold", g.resample.ess_threshold},
                   {"jitter", g.resample.jitter}}}};
  if (c.sweep) {
    j["sweep"] = {{"parameter", c.sweep->parameter},
                  {"values", c.sweep->values},
                  {"include_greedy", c.sweep->include_greedy}};
  }
  j["analysis"] = {{"van_trees", c.analysis.van_trees},
                   {"beta_scan", c.analysis.beta_scan},
                   {"su2_analytic", c.analysis.su2_analytic}};
  j["output"] = {{"root", c.output.root},
                 {"trace_csv", c.output.trace_csv},
                 {"realizations", c.output.realizations},
                 {"dump_sdp", c.output.dump_sdp},
                 {"hypotheses_csv", c.output.hypotheses_csv}};
  return j.dump(2);
}

void set_parameter(ExperimentConfig& c, const std::string& name, double value) {
  const std::string p = canonical_parameter(name);
  auto as_int = [&](const char* what) {
    if (value != std::floor(value)) {
      config_error(std::string(what) + ": sweep value must be an integer");
    }
    return static_cast<int>(value);
  };
  if (p == "channel.noise.p") {
    if (!c.channel.noise) c.channel.noise = NoiseConfig{};
    c.channel.noise->p = value;
  } else if (p == "channel.time") {
    c.channel.time = value;
  } else if (p == "prior.alpha") {
    c.prior.alpha = value;
  } else if (p == "prior.points") {
    c.prior.points = as_int("prior.points");
  } else if (p == "seesaw.outcomes") {
    c.seesaw.outcomes = as_int("seesaw.outcomes");
  } else if (p == "strategy.copies") {
    c.copies = as_int("strategy.copies");
    c.greedy.rounds = c.copies;
  } else {
    config_error("unknown sweep parameter '" + name + "'");
  }
  validate(c);
}

ChannelModel make_channel(const ExperimentConfig& c) {
  ChannelModel base;
  if (c.channel.kind == "su2") {
    base = ChannelModel::su2();
  } else if (c.channel.kind == "phase") {
    base = ChannelModel::phase(c.channel.time);
  } else if (c.channel.kind == "thermometry") {
    base = ChannelModel::thermometry(
        {c.channel.energy, c.channel.spectral_density, c.channel.time});
  } else {
    config_error("channel.kind: unknown channel '" + c.channel.kind + "'");
  }
  if (c.channel.noise) {
    return compose(ChannelModel::amplitude_damping(c.channel.noise->p), base);
  }
  return base;
}

HypothesisSet make_prior(const ExperimentConfig& c) {
  const auto& p = c.prior;
  if (p.kind == "haar_su2") return haar_prior_su2(p.points, p.sampling, c.seed);
  if (p.kind == "uniform") return uniform_prior(p.lo, p.hi, p.points);
  if (p.kind == "sine_exp") return sine_exp_prior(p.alpha, p.lo, p.hi, p.points);
  config_error("prior.kind: unknown prior '" + p.kind + "'");
}

CostKernel make_cost(const ExperimentConfig& c) {
  if (!c.cost.empty()) return CostKernel{parse_cost(c.cost)};
  if (c.channel.kind == "su2") return CostKernel{CostKind::FidelitySu2};
  if (c.channel.kind == "thermometry") return CostKernel{CostKind::RelativeMse};
  return CostKernel{CostKind::CosSquared};
}

int effective_outcomes(const ExperimentConfig& c) {
  if (c.seesaw.outcomes > 0) return c.seesaw.outcomes;
  return c.channel.kind == "thermometry" ? 20 : 27;
}

int effective_greedy_outcomes(const ExperimentConfig& c) {
  return c.greedy.outcomes > 0 ? c.greedy.outcomes : effective_outcomes(c);
}

}  // namespace bm
