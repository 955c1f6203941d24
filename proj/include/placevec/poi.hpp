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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "placevec/geo.hpp"
#include "placevec/text.hpp"

namespace placevec {

/// Label of a cell holding more than one POI.
inline constexpr const char* kMixedLabel = "mixed";
/// Label reported for cells without any POI.
inline constexpr const char* kNoPoiLabel = "NO POI";

struct PoiRecord {
  std::string id;
  GeoPoint pos;
  int code = 0;
  std::string category;
};

/// Cell -> category, or kMixedLabel. Cells without POIs are absent.
using CellLabelMap = std::map<CellId, std::string>;

struct PoiParseResult {
  std::vector<PoiRecord> records;
  std::size_t skipped = 0;
};

/// Reads `id,lon,lat,code,category`. Rows with invalid coordinates, an empty
/// category, or a reserved label as category are rejected.
PoiParseResult load_pois(std::istream& in, ParseMode mode = ParseMode::lenient);
void write_pois(std::ostream& out, const std::vector<PoiRecord>& pois);

/// One POI in a cell labels the cell with its category; two or more POIs
/// label it mixed, whatever their categories.
CellLabelMap label_cells(const std::vector<PoiRecord>& pois, const GridSpec& grid);

/// kNoPoiLabel when the cell has no label.
const std::string& label_of(const CellLabelMap& labels, CellId cell);

}  // namespace placevec
