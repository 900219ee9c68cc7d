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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "bayesmetro/experiment.hpp"

using namespace bm;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const fs::path& root) {
  ExperimentConfig c = parse_config(
      "name = \"tiny\"\nseed = 4\ncost = \"fidelity_su2\"\n"
      "[prior]\nkind = \"haar_su2\"\npoints = 60\n"
      "[strategy]\nclasses = [\"parallel\", \"sequential\"]\ncopies = 2\n"
      "[seesaw]\nrestarts = 0\nmax_iters = 3\noutcomes = 4\n"
      "[output]\ndump_sdp = true\nhypotheses_csv = true\n");
  c.output.root = root.string();
  validate(c);
  return c;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("optimize run writes the full output set") {
  const fs::path root = fs::temp_directory_path() / "bm_test_experiment";
  fs::remove_all(root);
  const ExperimentConfig c = small_config(root);
  const RunResult r = run_command(Command::Optimize, c, "<test>", "");
  CHECK(r.exit_code == 0);
  CHECK(r.error.empty());
  REQUIRE(fs::is_directory(r.dir));
  for (const char* f : {"manifest.json", "report.json", "hypotheses.csv",
                        "trace_parallel.csv", "trace_sequential.csv", "realization_parallel.json",
                        "realization_sequential.json", "sdp_parallel.txt"}) {
    CAPTURE(f);
    CHECK(fs::exists(r.dir / f));
  }
  CHECK(fs::equivalent(root / "latest", r.dir));

  const auto m = read_json(r.dir / "manifest.json");
  CHECK(m.at("status") == "ok");
  CHECK(m.at("seed") == 4);
  CHECK(m.at("versions").at("bayesmetro") == kVersion);
  // The echoed config reproduces the run.
  const ExperimentConfig again = load_config((r.dir / "manifest.json").string());
  CHECK(config_to_json(again) == config_to_json(c));

  const auto rep = read_json(r.dir / "report.json");
  const auto& cls = rep.at("results");
  REQUIRE(cls.size() == 2);
  CHECK(cls[0].at("score").get<double>() <= cls[1].at("score").get<double>() + 1e-6);

  // A second run gets its own directory and moves the link.
  const RunResult r2 = run_command(Command::Optimize, c, "<test>", "");
  CHECK(r2.dir != r.dir);
  CHECK(fs::equivalent(root / "latest", r2.dir));
  fs::remove_all(root);
}

TEST_CASE("configuration errors exit 2 without a run directory") {
  const fs::path root = fs::temp_directory_path() / "bm_test_experiment_bad";
  fs::remove_all(root);
  ExperimentConfig c = small_config(root);
  c.prior.points = 0;
  const RunResult r = run_command(Command::Optimize, c, "<test>", "");
  CHECK(r.exit_code == 2);
  CHECK(r.dir.empty());
  CHECK_FALSE(fs::exists(root));
}

TEST_CASE("solver failures exit 3 and keep partial outputs") {
  const fs::path root = fs::temp_directory_path() / "bm_test_experiment_fail";
  fs::remove_all(root);
  ExperimentConfig c = small_config(root);
  c.solver.max_iterations = 2;
  const RunResult r = run_command(Command::Optimize, c, "<test>", "");
  CHECK(r.exit_code == 3);
  REQUIRE_FALSE(r.dir.empty());
  CHECK(fs::exists(r.dir / "report.json"));
  const auto m = read_json(r.dir / "manifest.json");
  CHECK(m.at("status") != "ok");
  fs::remove_all(root);
}

TEST_CASE("greedy run compares adaptive and fixed strategies") {
  const fs::path root = fs::temp_directory_path() / "bm_test_experiment_greedy";
  fs::remove_all(root);
  ExperimentConfig c = small_config(root);
  c.greedy.trajectories = 40;
  c.greedy.rounds = 2;
  c.greedy.outcomes = 4;
  c.greedy.restarts = 0;
  c.greedy.max_iters = 3;
  const RunResult r = run_command(Command::Greedy, c, "<test>", "");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(r.dir / "rounds_greedy.csv"));
  CHECK(fs::exists(r.dir / "rounds_non_adaptive.csv"));
  CHECK(fs::exists(r.dir / "greedy_long.csv"));
  const auto rep = read_json(r.dir / "greedy_report.json");
  CHECK(rep.contains("paired_difference"));
  fs::remove_all(root);
}
