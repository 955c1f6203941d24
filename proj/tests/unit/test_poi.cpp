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


#include <doctest.h>

#include <sstream>

#include "placevec/poi.hpp"

using namespace placevec;

namespace {

PoiParseResult parse(const std::string& text, ParseMode mode = ParseMode::lenient) {
  std::istringstream in(text);
  return load_pois(in, mode);
}

const char* kHeader = "id,lon,lat,code,category\n";

}  // namespace

TEST_CASE("load_pois examples") {
  CHECK(parse(kHeader).records.empty());
  const auto one = parse(std::string(kHeader) + "p1,23.7,37.9,2101,pharmacy\n");
  REQUIRE(one.records.size() == 1);
  CHECK(one.records[0].id == "p1");
  CHECK(one.records[0].pos.lon == 23.7);
  CHECK(one.records[0].pos.lat == 37.9);
  CHECK(one.records[0].code == 2101);
  CHECK(one.records[0].category == "pharmacy");
  const auto bad = parse(std::string(kHeader) + "p1,200,37.9,2101,pharmacy\np2,23.7,37.9,2101,pharmacy\n");
  CHECK(bad.records.size() == 1);
  CHECK(bad.skipped == 1);
  CHECK_THROWS_AS(parse(std::string(kHeader) + "p1,200,37.9,2101,pharmacy\n", ParseMode::strict), FormatError);
  CHECK_THROWS_AS(parse("id,lon,lat,category\n"), FormatError);
}

TEST_CASE("load_pois rejects the reserved labels") {
  const auto r = parse(std::string(kHeader) + "p1,23.7,37.9,1,mixed\np2,23.7,37.9,1,NO POI\np3,23.7,37.9,1,\n");
  CHECK(r.records.empty());
  CHECK(r.skipped == 3);
}

TEST_CASE("label_cells counts POIs per cell") {
  const GridSpec g{30.0};
  const GeoPoint base = cell_centroid(cell_from_index({100, 200}), g);
  const GeoPoint other = cell_centroid(cell_from_index({105, 200}), g);
  const CellId c = cell_of(base, g);
  const PoiRecord pharmacy{"a", base, 2101, "pharmacy"};
  const PoiRecord bar{"b", base, 2305, "bar"};
  const PoiRecord pharmacy2{"c", base, 2101, "pharmacy"};
  const PoiRecord far{"d", other, 2101, "pharmacy"};

  const auto single = label_cells({pharmacy, far}, g);
  CHECK(single.at(c) == "pharmacy");
  CHECK(single.size() == 2);
  CHECK(label_cells({pharmacy, bar}, g).at(c) == kMixedLabel);
  CHECK(label_cells({pharmacy, pharmacy2}, g).at(c) == kMixedLabel);
  CHECK(label_of(single, cell_from_index({0, 0})) == kNoPoiLabel);
  CHECK(label_of(single, c) == "pharmacy");
}

TEST_CASE("POI files round-trip") {
  const std::vector<PoiRecord> pois = {{"p1", {23.7, 37.9}, 2101, "pharmacy"}, {"p2", {-0.12, 51.5}, 5250, "fuel"}};
  std::stringstream buf;
  write_pois(buf, pois);
  const auto back = load_pois(buf, ParseMode::strict);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[1].category == "fuel");
  CHECK(back.records[1].pos.lon == doctest::Approx(-0.12).epsilon(1e-12));
}
