//  Copyright 2026 The placevec Authors. All Rights Reserved.
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#include "placevec/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace placevec {

using nlohmann::json;

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json range_json(const DistanceRange& r) {
  return {{"min_m", number(r.min_m)}, {"max_m", number(r.max_m)}};
}

json point_feature(const GeoPoint& p, json properties) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {p.lon, p.lat}}}},
          {"properties", std::move(properties)}};
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string significance_marker(double p) {
  if (p < 0.001) return "***";
  if (p < 0.05) return "*";
  return "";
}

json to_json(const LinearFit& fit) {
  return {{"slope", number(fit.slope)},
          {"intercept", number(fit.intercept)},
          {"r_squared", number(fit.r_squared)},
          {"n", fit.n}};
}

json to_json(const CorpusStats& stats) {
  return {{"n_sequences", stats.n_sequences},
          {"n_cells", stats.n_cells},
          {"mean_len", stats.mean_len},
          {"stddev_len", stats.stddev_len}};
}

json to_json(const NeighborReport& report) {
  json neighbors = json::array();
  for (std::size_t i = 0; i < report.neighbors.size(); ++i) {
    const auto& n = report.neighbors[i];
    neighbors.push_back({{"rank", i + 1},
                         {"cell", n.cell.code},
                         {"similarity", number(n.similarity)},
                         {"label", n.label},
                         {"distance_m", number(n.distance_m)},
                         {"lon", n.centroid.lon},
                         {"lat", n.centroid.lat}});
  }
  return {{"task", "neighbor_report"},
          {"target",
           {{"cell", report.target.code},
            {"label", report.target_label},
            {"lon", report.target_centroid.lon},
            {"lat", report.target_centroid.lat}}},
          {"k", report.neighbors.size()},
          {"neighbors", std::move(neighbors)}};
}

json to_geojson(const NeighborReport& report) {
  json features = json::array();
  features.push_back(point_feature(report.target_centroid, {{"role", "target"},
                                                            {"rank", 0},
                                                            {"cell", std::to_string(report.target.code)},
                                                            {"label", report.target_label},
                                                            {"similarity", 1.0},
                                                            {"distance_m", 0.0}}));
  for (std::size_t i = 0; i < report.neighbors.size(); ++i) {
    const auto& n = report.neighbors[i];
    features.push_back(point_feature(n.centroid, {{"role", "neighbor"},
                                                  {"rank", i + 1},
                                                  {"cell", std::to_string(n.cell.code)},
                                                  {"label", n.label},
                                                  {"similarity", number(n.similarity)},
                                                  {"distance_m", number(n.distance_m)}}));
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

json to_json(const CategoryTestResult& r) {
  return {{"category", r.category},
          {"sample_size", r.sample_size},
          {"other_size", r.other_size},
          {"intra_pairs", r.intra_pairs},
          {"inter_pairs", r.inter_pairs},
          {"intra_mean", number(r.intra_mean)},
          {"inter_mean", number(r.inter_mean)},
          {"t_stat", number(r.t_stat)},
          {"t_stat_text", std::isfinite(r.t_stat) ? json(nullptr) : json(r.t_stat > 0 ? "inf" : "-inf")},
          {"df", number(r.df)},
          {"p_two_sided", number(r.p_two_sided)},
          {"significance", significance_marker(r.p_two_sided)}};
}

json to_json(const DecayModel& m) {
  json out = {{"name", m.name}, {"range", range_json(m.range)}, {"n_pairs", m.n_pairs}};
  out["fit"] = m.fit ? to_json(*m.fit) : json(nullptr);
  return out;
}

json to_json(const Variogram& v) {
  json bins = json::array();
  for (const auto& b : v.bins) {
    bins.push_back({{"h_lo", b.h_lo}, {"h_hi", b.h_hi}, {"n_pairs", b.n_pairs}, {"gamma", number(b.gamma)}});
  }
  return {{"task", "semivariogram"},
          {"bin_width", v.bin_width},
          {"max_dist", v.max_dist},
          {"bins", std::move(bins)},
          {"fit", v.fit ? to_json(*v.fit) : json(nullptr)}};
}

DecayCsvWriter::DecayCsvWriter(std::ostream& out) : out_(out) { out_ << "D,CS\n"; }

void DecayCsvWriter::operator()(double d, double cs) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f,%.9g\n", d, cs);
  out_ << buf;
}

void write_variogram_csv(std::ostream& out, const Variogram& v) {
  out << "h_mid,n_pairs,gamma\n";
  char buf[96];
  for (const auto& b : v.bins) {
    if (b.n_pairs > 0) {
      std::snprintf(buf, sizeof(buf), "%.3f,%llu,%.9g\n", b.h_mid(), static_cast<unsigned long long>(b.n_pairs),
                    b.gamma);
    } else {
      std::snprintf(buf, sizeof(buf), "%.3f,0,NA\n", b.h_mid());
    }
    out << buf;
  }
}

void write_svg(std::ostream& out, const SvgScatter& plot) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!plot.points.empty()) {
    x0 = x1 = plot.points.front().first;
    y0 = y1 = plot.points.front().second;
    for (const auto& [x, y] : plot.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  const auto sy = [&](double y) { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); };

  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(plot.title) << "</text>\n";
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                kLeft, kH - kBottom, kW - kRight, kH - kBottom, kLeft, kTop, kLeft, kH - kBottom);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%.4g</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                kLeft, kH - kBottom + 14, x0, kW - kRight, kH - kBottom + 14, x1);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                kLeft - 4, kH - kBottom, y0, kLeft - 4, kTop + 8, y1);
  out << buf;
  out << "<text x=\"320\" y=\"410\" text-anchor=\"middle\" font-size=\"12\">" << svg_escape(plot.x_label)
      << "</text>\n";
  out << "<text x=\"16\" y=\"210\" font-size=\"12\" transform=\"rotate(-90 16 210)\" text-anchor=\"middle\">"
      << svg_escape(plot.y_label) << "</text>\n";
  out << "<g fill=\"steelblue\" fill-opacity=\"0.5\">\n";
  for (const auto& [x, y] : plot.points) {
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"1.5\"/>\n", sx(x), sy(y));
    out << buf;
  }
  out << "</g>\n";
  if (plot.line) {
    const double ya = plot.line->slope * x0 + plot.line->intercept;
    const double yb = plot.line->slope * x1 + plot.line->intercept;
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"crimson\"/>\n",
                  sx(x0), sy(ya), sx(x1), sy(yb));
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace placevec
