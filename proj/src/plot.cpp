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

#include "bayesmetro/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "bayesmetro/common.hpp"

namespace bm {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  if (s.empty()) return std::nan("");
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    return pos == s.size() ? v : std::nan("");
  } catch (const std::exception&) {
    return std::nan("");
  }
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    t.push_back(v);
  }
  return t;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::vector<PlotSeries> read_plot_csv(const std::string& path, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::InvalidArgument, path + ": empty file");
  }
  const auto header = split(line);
  auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int cx = col("value"), cy = col("score"), ce = col("stderr"), cc = col("class");
  const bool rounds = cx < 0 && col("round") >= 0;
  if (rounds) {
    cx = col("round");
    cy = col("mean");
    cc = -1;
  }
  std::vector<std::string> missing;
  if (cx < 0) missing.emplace_back(rounds ? "round" : "value");
  if (cy < 0) missing.emplace_back(rounds ? "mean" : "score");
  if (!rounds && cc < 0) missing.emplace_back("class");
  if (!missing.empty()) {
    std::string m;
    for (const auto& s : missing) m += (m.empty() ? "" : ", ") + s;
    throw Error(ErrorKind::InvalidArgument, path + ": missing column(s) " + m);
  }

  std::vector<PlotSeries> out;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    auto cell = [&](int c) { return c >= 0 && c < static_cast<int>(cells.size()) ? cells[c] : std::string(); };
    PlotPoint p{to_double(cell(cx)), to_double(cell(cy)), ce >= 0 ? to_double(cell(ce)) : 0.0};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    if (!std::isfinite(p.err)) p.err = 0.0;
    const std::string name = cc >= 0 ? cell(cc) : label;
    auto [it, fresh] = index.emplace(name, out.size());
    if (fresh) out.push_back(PlotSeries{name, {}});
    out[it->second].points.push_back(p);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, path + ": no data rows");
  for (auto& s : out) {
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
  }
  return out;
}

void write_svg(std::ostream& os, const std::vector<PlotSeries>& series,
               const PlotOptions& o) {
  if (series.empty()) throw Error(ErrorKind::InvalidArgument, "plot: nothing to draw");
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      xlo = std::min(xlo, p.x);
      xhi = std::max(xhi, p.x);
      ylo = std::min(ylo, p.y - p.err);
      yhi = std::max(yhi, p.y + p.err);
    }
  }
  if (!(xhi > xlo)) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (!(yhi > ylo)) {
    ylo -= 0.05;
    yhi += 0.05;
  }
  const double pad = 0.05 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;

  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = o.width - left - right, ph = o.height - top - bottom;
  auto sx = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
  auto sy = [&](double y) { return top + (yhi - y) / (yhi - ylo) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
     << o.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty()) {
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(o.title) << "</text>\n";
  }
  os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xlo, xhi)) {
    os << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(sx(t))
       << "\" y2=\"" << fmt(top + ph + 5) << "\" stroke=\"black\"/>"
       << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << fmt(top + ph + 18)
       << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ylo, yhi)) {
    os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << fmt(left)
       << "\" y2=\"" << fmt(sy(t)) << "\" stroke=\"black\"/>"
       << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(sy(t) + 4)
       << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(o.height - 10.0)
     << "\" text-anchor=\"middle\">" << escape(o.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt(top + ph / 2) << ")\">" << escape(o.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    os << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    if (s.points.size() > 1) {
      os << "<polyline fill=\"none\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        os << (i ? " " : "") << fmt(sx(s.points[i].x)) << "," << fmt(sy(s.points[i].y));
      }
      os << "\"/>\n";
    }
    for (const auto& p : s.points) {
      if (p.err > 0.0) {
        const double x = sx(p.x), y0 = sy(p.y - p.err), y1 = sy(p.y + p.err);
        os << "<path fill=\"none\" d=\"M" << fmt(x) << " " << fmt(y0) << "V" << fmt(y1) << "M"
           << fmt(x - 4) << " " << fmt(y0) << "H" << fmt(x + 4) << "M" << fmt(x - 4) << " "
           << fmt(y1) << "H" << fmt(x + 4) << "\"/>\n";
      }
      os << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y)) << "\" r=\"3\"/>\n";
    }
    const double ly = top + 10 + 18.0 * k;
    os << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
       << fmt(left + pw + 32) << "\" y2=\"" << fmt(ly) << "\"/>"
       << "<text stroke=\"none\" fill=\"black\" x=\"" << fmt(left + pw + 38) << "\" y=\""
       << fmt(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
}

void plot_files(const std::vector<std::string>& inputs, const std::string& out,
                PlotOptions options) {
  if (inputs.empty()) throw Error(ErrorKind::InvalidArgument, "plot: no input files");
  std::vector<PlotSeries> all;
  for (const auto& path : inputs) {
    std::string stem = path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    if (stem.size() > 4 && stem.ends_with(".csv")) stem.resize(stem.size() - 4);
    if (stem.starts_with("rounds_")) stem = stem.substr(7);
    for (auto& s : read_plot_csv(path, stem)) {
      auto it = std::find_if(all.begin(), all.end(),
                             [&](const PlotSeries& a) { return a.label == s.label; });
      if (it == all.end()) {
        all.push_back(std::move(s));
      } else {
        it->points.insert(it->points.end(), s.points.begin(), s.points.end());
        std::stable_sort(it->points.begin(), it->points.end(),
                         [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
      }
    }
  }
  std::ofstream os(out);
  if (!os) throw Error(ErrorKind::Io, "cannot write '" + out + "'");
  write_svg(os, all, options);
  if (!os) throw Error(ErrorKind::Io, "write failed for '" + out + "'");
}

}  // namespace bm
