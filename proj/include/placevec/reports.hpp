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

#pragma once

// JSON, GeoJSON, CSV and SVG emitters for the analytics results.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "placevec/analytics.hpp"
#include "placevec/corpus.hpp"

namespace placevec {

/// "***" for p < 0.001, "*" for p < 0.05, "" otherwise.
std::string significance_marker(double p);

nlohmann::json to_json(const LinearFit& fit);
nlohmann::json to_json(const CorpusStats& stats);
nlohmann::json to_json(const NeighborReport& report);
nlohmann::json to_geojson(const NeighborReport& report);
nlohmann::json to_json(const CategoryTestResult& result);
nlohmann::json to_json(const DecayModel& model);
nlohmann::json to_json(const Variogram& variogram);

/// `D,CS` rows.
class DecayCsvWriter {
 public:
  explicit DecayCsvWriter(std::ostream& out);
  void operator()(double d, double cs);

 private:
  std::ostream& out_;
};

/// `h_mid,n_pairs,gamma`; empty bins carry `NA`.
void write_variogram_csv(std::ostream& out, const Variogram& variogram);

struct SvgScatter {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  /// Optional line y = slope * x + intercept drawn across the x range.
  std::optional<LinearFit> line;
};

/// Axes, points and an optional fitted line.
void write_svg(std::ostream& out, const SvgScatter& plot);

}  // namespace placevec
