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

// Score-vs-parameter SVG charts from sweep / greedy CSV files.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bm {

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  double err = 0.0;
};

struct PlotSeries {
  std::string label;
  std::vector<PlotPoint> points;
};

/// Reads one CSV.  Long format (value, class, score, stderr) yields one
/// series per class; round format (round, mean, stderr) yields one series
/// labelled `label`.  Rows with a non-finite score are dropped.
/// Throws Error(Io) if unreadable, Error(InvalidArgument) for missing
/// columns or when no usable row remains.
std::vector<PlotSeries> read_plot_csv(const std::string& path,
                                      const std::string& label);

struct PlotOptions {
  std::string title;
  std::string x_label = "parameter";
  std::string y_label = "score";
  int width = 640;
  int height = 420;
};

/// Deterministic SVG: same series and options give the same bytes.
void write_svg(std::ostream& os, const std::vector<PlotSeries>& series,
               const PlotOptions& options);

/// Reads every input (series merged by label in input order) and writes
/// the chart to `out`.
void plot_files(const std::vector<std::string>& inputs, const std::string& out,
                PlotOptions options);

}  // namespace bm
