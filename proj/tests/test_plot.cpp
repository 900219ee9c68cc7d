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
#include <sstream>

#include "bayesmetro/common.hpp"
#include "bayesmetro/plot.hpp"

using namespace bm;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "bm_test_plot";
  fs::create_directories(d);
  return d;
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("long CSV gives one series per class") {
  const auto p = write("long.csv",
                       "value,class,score,stderr\n0,parallel,0.5,0\n1,parallel,0.4,0\n"
                       "0,sequential,0.6,0.01\n1,sequential,nan,0\n");
  const auto s = read_plot_csv(p.string(), "x");
  REQUIRE(s.size() == 2);
  CHECK(s[0].label == "parallel");
  CHECK(s[0].points.size() == 2);
  CHECK(s[1].points.size() == 1);
  CHECK(s[1].points[0].err == 0.01);
}

TEST_CASE("rounds CSV and deterministic SVG") {
  const auto p = write("rounds_greedy.csv",
                       "round,mean,stderr,expected,expected_stderr\n1,0.5,0.01,0.5,0\n"
                       "2,0.6,0.01,0.6,0\n");
  const auto out1 = scratch() / "a.svg";
  const auto out2 = scratch() / "b.svg";
  plot_files({p.string()}, out1.string(), {});
  plot_files({p.string()}, out2.string(), {});
  auto slurp = [](const fs::path& f) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(out1);
  CHECK(a == slurp(out2));
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find(">greedy<") != std::string::npos);
}

TEST_CASE("plot input errors") {
  const auto bad = write("bad.csv", "x,y\n1,2\n");
  const auto empty = write("empty.csv", "value,class,score,stderr\n");
  auto kind_of = [](const fs::path& p) {
    try {
      read_plot_csv(p.string(), "x");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  CHECK(kind_of(bad) == ErrorKind::InvalidArgument);
  CHECK(kind_of(empty) == ErrorKind::InvalidArgument);
  CHECK(kind_of(scratch() / "none.csv") == ErrorKind::Io);
  fs::remove_all(scratch());
}
