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

#include "bayesmetro/config.hpp"

using namespace bm;

namespace {

std::string config_message(const std::string& text) {
  try {
    validate(parse_config(text));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("empty config takes defaults") {
  const ExperimentConfig c = parse_config("");
  validate(c);
  CHECK(c.channel.kind == "su2");
  CHECK(c.prior.points == 2000);
  CHECK(c.solver.tolerance == 1e-8);
  CHECK(c.classes.size() == 1);
  CHECK(c.greedy.trajectories == 10000);
  CHECK_FALSE(c.sweep.has_value());
}

TEST_CASE("schema violations name the field") {
  CHECK(contains(config_message("[channel]\nbogus = 1\n"), "unknown key 'channel.bogus'"));
  CHECK(contains(config_message("seed = \"x\"\n"), "seed"));
  CHECK(contains(config_message("[prior]\npoints = 1.5\n"), "expected an integer"));
  CHECK(contains(config_message("[prior]\npoints = 0\n"), "prior.points"));
  CHECK(contains(config_message("[strategy]\nclasses = [\"bogus\"]\n"),
                 "unknown strategy class"));
  CHECK(contains(config_message("[solver]\nbackend = \"gpu\"\n"), "solver.backend"));
  CHECK(contains(config_message("[channel]\nkind = \"nope\"\n"), "channel.kind"));
  CHECK(contains(config_message("[channel]\nnoise = { kind = \"amplitude_damping\", p = 2.0 }\n"),
                 "channel.noise.p"));
  CHECK(contains(config_message("[sweep]\nparameter = \"p\"\nvalues = []\n"), "sweep"));
  CHECK(contains(config_message("this is not toml ="), ""));
  CHECK_FALSE(config_message("this is not toml =").empty());
}

TEST_CASE("JSON round trip preserves the effective config") {
  ExperimentConfig c = parse_config(
      "name = \"rt\"\nseed = 99\n[strategy]\nclasses = [\"sequential\", \"general\"]\n"
      "copies = 2\n[sweep]\nparameter = \"p\"\nvalues = [0.0, 0.5]\n"
      "[channel.noise]\nkind = \"amplitude_damping\"\np = 0.3\n");
  validate(c);
  const std::string j1 = config_to_json(c);
  const ExperimentConfig back = config_from_json(j1);
  CHECK(config_to_json(back) == j1);
  CHECK(back.seed == 99);
  CHECK(back.copies == 2);
  REQUIRE(back.sweep.has_value());
  CHECK(back.sweep->values.size() == 2);
  REQUIRE(back.channel.noise.has_value());
  CHECK(back.channel.noise->p == 0.3);
}

TEST_CASE("manifest files load as configs") {
  ExperimentConfig c = parse_config("name = \"m\"\nseed = 5\n");
  const auto dir = std::filesystem::temp_directory_path() / "bm_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.json";
  {
    std::ofstream out(path);
    out << "{\"command\": \"optimize\", \"config\": " << config_to_json(c) << "}";
  }
  const ExperimentConfig back = load_config(path.string());
  CHECK(back.name == "m");
  CHECK(back.seed == 5);
  std::filesystem::remove_all(dir);
  try {
    load_config((dir / "missing.toml").string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("sweep parameters") {
  ExperimentConfig c = parse_config("[channel.noise]\nkind = \"amplitude_damping\"\n");
  set_parameter(c, "p", 0.4);
  CHECK(c.channel.noise->p == 0.4);
  set_parameter(c, "k", 3);
  CHECK(c.copies == 3);
  CHECK(c.greedy.rounds == 3);
  set_parameter(c, "channel.time", 2.0);
  CHECK(c.channel.time == 2.0);
  CHECK_THROWS_AS(set_parameter(c, "k", 1.5), Error);
  CHECK_THROWS_AS(set_parameter(c, "nothing", 1.0), Error);
}

TEST_CASE("derived objects") {
  ExperimentConfig c = parse_config(
      "[channel]\nkind = \"thermometry\"\ntime = 1.0\n"
      "[prior]\nkind = \"uniform\"\nlo = 1.0\nhi = 3.0\npoints = 5\n");
  validate(c);
  const HypothesisSet h = make_prior(c);
  CHECK(h.size() == 5);
  CHECK(h.point(0)(0) == 1.0);
  CHECK(h.point(4)(0) == 3.0);
  CHECK(effective_outcomes(c) >= 2);
}
