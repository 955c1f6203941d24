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

#include "placevec/poi.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace placevec {

PoiParseResult load_pois(std::istream& in, ParseMode mode) {
  PoiParseResult result;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("POI CSV is empty: missing header");
  std::string_view header = line;
  if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const auto cols = header_columns(header, {"id", "lon", "lat", "code", "category"});
  const std::size_t needed = *std::max_element(cols.begin(), cols.end()) + 1;

  std::vector<std::string_view> fields;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    split(row, ',', fields);
    const char* problem = nullptr;
    PoiRecord rec;
    if (fields.size() < needed) {
      problem = "too few fields";
    } else {
      const auto lon = parse_double(fields[cols[1]]);
      const auto lat = parse_double(fields[cols[2]]);
      const auto code = parse_int<int>(fields[cols[3]]);
      const auto category = trim(fields[cols[4]]);
      if (!lon || !lat) {
        problem = "unparseable coordinate";
      } else if (!code) {
        problem = "unparseable category code";
      } else if (category.empty()) {
        problem = "empty category";
      } else if (category == kMixedLabel || category == kNoPoiLabel) {
        problem = "category uses a reserved label";
      } else {
        rec.id = std::string(trim(fields[cols[0]]));
        rec.pos = {*lon, *lat};
        rec.code = *code;
        rec.category = std::string(category);
        if (!is_valid(rec.pos)) problem = "coordinate out of range";
      }
    }
    if (problem) {
      if (mode == ParseMode::strict) throw FormatError("POI CSV line " + std::to_string(line_no) + ": " + problem);
      ++result.skipped;
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

void write_pois(std::ostream& out, const std::vector<PoiRecord>& pois) {
  out << "id,lon,lat,code,category\n";
  char buf[64];
  for (const auto& p : pois) {
    std::snprintf(buf, sizeof(buf), ",%.8f,%.8f,", p.pos.lon, p.pos.lat);
    out << p.id << buf << p.code << ',' << p.category << '\n';
  }
}

CellLabelMap label_cells(const std::vector<PoiRecord>& pois, const GridSpec& grid) {
  std::unordered_map<CellId, std::size_t> count;
  CellLabelMap labels;
  for (const auto& p : pois) {
    const CellId c = cell_of(p.pos, grid);
    if (++count[c] == 1) {
      labels[c] = p.category;
    } else {
      labels[c] = kMixedLabel;
    }
  }
  return labels;
}

const std::string& label_of(const CellLabelMap& labels, CellId cell) {
  static const std::string no_poi = kNoPoiLabel;
  const auto it = labels.find(cell);
  return it == labels.end() ? no_poi : it->second;
}

}  // namespace placevec
