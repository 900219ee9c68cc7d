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

// bayesmetro command line.  Talks to the library only through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bayesmetro/bayesmetro.h"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> tol;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Config file (TOML, or a run manifest.json)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output root; overrides output.root");
  sub->add_option("--seed", c.seed, "Master seed; overrides seed");
  sub->add_option("--workers", c.workers, "Worker threads; overrides workers");
  sub->add_option("--tol", c.tol, "SDP tolerance; overrides solver.tolerance");
}

int report(bm_status s) {
  std::cerr << "error: " << bm_last_error() << "\n";
  return bm_exit_code(s);
}

// Loads the config and applies flag overrides.  Returns nullptr after
// printing the error; `code` then holds the exit code.
bm_config* load(const Common& c, int& code) {
  bm_config* cfg = nullptr;
  bm_status s = bm_config_load(c.config.c_str(), &cfg);
  if (s == BM_OK && c.seed) s = bm_config_set_seed(cfg, *c.seed);
  if (s == BM_OK && c.workers) s = bm_config_set_workers(cfg, *c.workers);
  if (s == BM_OK && c.tol) s = bm_config_set_tolerance(cfg, *c.tol);
  if (s == BM_OK && !c.out.empty()) s = bm_config_set_output_root(cfg, c.out.c_str());
  if (s != BM_OK) {
    // Invalid override values are configuration errors too.
    code = report(s == BM_ERR_INVALID_ARGUMENT ? BM_ERR_CONFIG : s);
    bm_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

int run(bm_command command, const Common& c, const std::string& parameter,
        const std::optional<std::vector<double>>& values) {
  int code = 0;
  bm_config* cfg = load(c, code);
  if (!cfg) return code;
  // Validation of the new table happens in bm_run_command.
  if (values) bm_config_set_sweep(cfg, parameter.c_str(), values->data(), values->size());
  bm_run* r = nullptr;
  const bm_status s = bm_run_command(command, cfg, &r);
  if (r) {
    std::cout << bm_run_summary(r) << "\n";
    std::cerr << "run directory: " << bm_run_directory(r) << "\n";
  }
  if (s != BM_OK) {
    code = report(s);
  }
  bm_run_free(r);
  bm_config_free(cfg);
  return code;
}

// A run directory stands for its aggregated CSV.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      out.push_back(in);
      continue;
    }
    bool found = false;
    for (const char* name : {"sweep.csv", "greedy_long.csv"}) {
      const fs::path p = fs::path(in) / name;
      if (fs::exists(p)) {
        out.push_back(p.string());
        found = true;
        break;
      }
    }
    if (!found) out.push_back((fs::path(in) / "sweep.csv").string());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian quantum metrology: optimal and greedy testers"};
  app.set_version_flag("--version", std::string(bm_version()));
  app.require_subcommand(1);

  Common opt, gre, swp, val;
  auto* optimize = app.add_subcommand("optimize", "Seesaw optimization for each strategy class");
  add_common(optimize, opt);
  auto* greedy = app.add_subcommand("greedy", "Greedy adaptive and non-adaptive simulation");
  add_common(greedy, gre);
  auto* sweep = app.add_subcommand("sweep", "One optimize run per parameter value");
  add_common(sweep, swp);
  std::string parameter;
  std::vector<std::string> raw_values;
  sweep->add_option("--parameter", parameter, "Swept parameter; replaces the [sweep] table with --values");
  sweep->add_option("--values", raw_values, "Comma-separated sweep values")
      ->delimiter(',');

  auto* validate = app.add_subcommand("validate-config", "Check a config and print it with defaults");
  validate->add_option("--config", val.config, "Config file")->required()->check(CLI::ExistingFile);
  bool quiet = false;
  validate->add_flag("-q,--quiet", quiet, "Only set the exit code");

  auto* plot = app.add_subcommand("plot", "SVG chart from sweep or greedy CSV files");
  std::vector<std::string> inputs;
  std::string plot_out, title, xlabel = "parameter", ylabel = "score";
  plot->add_option("inputs", inputs, "CSV files or run directories")->required();
  plot->add_option("--out", plot_out, "Output SVG path")->required();
  plot->add_option("--title", title, "Chart title");
  plot->add_option("--xlabel", xlabel, "x-axis label");
  plot->add_option("--ylabel", ylabel, "y-axis label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*optimize) return run(BM_CMD_OPTIMIZE, opt, "", std::nullopt);
  if (*greedy) return run(BM_CMD_GREEDY, gre, "", std::nullopt);
  if (*sweep) {
    const bool has_p = sweep->count("--parameter") > 0, has_v = sweep->count("--values") > 0;
    if (has_p != has_v) {
      std::cerr << "error: --parameter and --values go together\n";
      return 1;
    }
    std::optional<std::vector<double>> values;
    if (has_v) {
      values.emplace();
      for (const auto& v : raw_values) {
        if (v.empty()) continue;
        try {
          std::size_t pos = 0;
          values->push_back(std::stod(v, &pos));
          if (pos != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
          std::cerr << "error: --values: '" << v << "' is not a number\n";
          return 2;
        }
      }
    }
    return run(BM_CMD_SWEEP, swp, parameter, values);
  }
  if (*validate) {
    bm_config* cfg = nullptr;
    bm_status s = bm_config_load(val.config.c_str(), &cfg);
    if (s == BM_OK) s = bm_config_validate(cfg);
    char* json = nullptr;
    if (s == BM_OK && !quiet) s = bm_config_to_json(cfg, &json);
    bm_config_free(cfg);
    if (s != BM_OK) return report(s);
    if (json) std::cout << json << "\n";
    bm_string_free(json);
    return 0;
  }
  if (*plot) {
    const auto files = expand_inputs(inputs);
    std::vector<const char*> ptrs;
    for (const auto& f : files) ptrs.push_back(f.c_str());
    const bm_status s = bm_plot(ptrs.data(), ptrs.size(), plot_out.c_str(),
                                title.c_str(), xlabel.c_str(), ylabel.c_str());
    if (s != BM_OK) return report(s);
    std::cerr << "wrote " << plot_out << "\n";
    return 0;
  }
  return 1;
}
