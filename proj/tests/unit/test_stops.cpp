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

#include <cmath>
#include <random>
#include <sstream>

#include "placevec/stops.hpp"

using namespace placevec;

namespace {

const GeoPoint kHere{23.7275, 37.9838};
constexpr UnixSeconds kT0 = 1496304000;  // 2017-06-01T08:00:00Z

WaypointRecord at(UnixSeconds t, const GeoPoint& p) { return {"v", t, p}; }

// A dwell at `where` sampled every 30 s from t0 to t0 + seconds inclusive.
std::vector<WaypointRecord> dwell(const GeoPoint& where, UnixSeconds t0, int seconds) {
  std::vector<WaypointRecord> out;
  for (int s = 0; s <= seconds; s += 30) out.push_back(at(t0 + s, where));
  return out;
}

}  // namespace

TEST_CASE("pure dwell: 12 points spanning 360 s give one 360-s stop") {
  std::vector<WaypointRecord> pts;
  for (int i = 0; i < 12; ++i) pts.push_back(at(kT0 + (i * 360) / 11, kHere));
  const auto stops = detect_stops(pts);
  REQUIRE(stops.size() == 1);
  CHECK(stops[0].duration() == 360);
  CHECK(stops[0].n_points == 12);
  CHECK(stops[0].centroid.lon == doctest::Approx(kHere.lon).epsilon(1e-13));
  CHECK(stops[0].centroid.lat == doctest::Approx(kHere.lat).epsilon(1e-13));
}

TEST_CASE("constant motion: 100 m every 30 s gives no stop") {
  std::vector<WaypointRecord> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(at(kT0 + 30 * i, offset_m(kHere, 100.0 * i, 0.0)));
  CHECK(detect_stops(pts).empty());
}

TEST_CASE("noisy dwell: two isolated 500-m spikes inside an 8-minute dwell") {
  auto pts = dwell(kHere, kT0, 480);  // 17 points
  REQUIRE(pts.size() == 17);
  pts[4].pos = offset_m(kHere, 500.0, 0.0);
  pts[10].pos = offset_m(kHere, 0.0, -500.0);
  const auto stops = detect_stops(pts);
  REQUIRE(stops.size() == 1);
  CHECK(stops[0].t_start == kT0);
  CHECK(stops[0].t_end == kT0 + 480);
  CHECK(stops[0].duration() == 480);
  CHECK(stops[0].n_points == 15);
  CHECK(distance_m(stops[0].centroid, kHere) < 1e-6);
}

TEST_CASE("up to max_noise_run consecutive outliers do not split a stop") {
  for (int run = 1; run <= 2; ++run) {
    auto pts = dwell(kHere, kT0, 900);
    for (int k = 0; k < run; ++k) pts[15 + k].pos = offset_m(kHere, 400.0, 0.0);
    CHECK(detect_stops(pts).size() == 1);
  }
  auto pts = dwell(kHere, kT0, 1200);
  for (int k = 0; k < 3; ++k) pts[20 + k].pos = offset_m(kHere, 400.0, 0.0);
  const auto stops = detect_stops(pts);
  REQUIRE(stops.size() == 2);
  CHECK(stops[0].t_end == kT0 + 19 * 30);
  CHECK(stops[1].t_start == kT0 + 23 * 30);
}

TEST_CASE("a long recording gap closes the cluster") {
  auto pts = dwell(kHere, kT0, 240);
  auto later = dwell(kHere, kT0 + 240 + 700, 240);
  pts.insert(pts.end(), later.begin(), later.end());
  CHECK(detect_stops(pts).empty());
  auto joined = dwell(kHere, kT0, 240);
  auto soon = dwell(kHere, kT0 + 240 + 500, 240);
  joined.insert(joined.end(), soon.begin(), soon.end());
  CHECK(detect_stops(joined).size() == 1);
}

TEST_CASE("the duration boundary is inclusive") {
  CHECK(detect_stops(dwell(kHere, kT0, 300)).size() == 1);
  CHECK(detect_stops(dwell(kHere, kT0, 270)).empty());
}

TEST_CASE("stops are long enough, disjoint and ordered on random traces") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 8.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<WaypointRecord> pts;
    UnixSeconds t = kT0;
    GeoPoint where = kHere;
    for (int leg = 0; leg < 8; ++leg) {
      const int n = 2 + static_cast<int>(unit(rng) * 30);
      for (int i = 0; i < n; ++i) {
        pts.push_back(at(t, offset_m(where, noise(rng), noise(rng))));
        t += 20 + static_cast<UnixSeconds>(unit(rng) * 20);
      }
      where = offset_m(where, 200.0 + 800.0 * unit(rng), 300.0 * (unit(rng) - 0.5));
    }
    const auto stops = detect_stops(pts);
    for (std::size_t i = 0; i < stops.size(); ++i) {
      CHECK(stops[i].duration() >= 300);
      if (i > 0) CHECK(stops[i].t_start > stops[i - 1].t_end);
    }
  }
}

TEST_CASE("stops_to_cell_sequence collapses consecutive repeats") {
  const GridSpec g{30.0};
  const GeoPoint c1 = cell_centroid(cell_from_index({10, 10}), g);
  const GeoPoint c2 = cell_centroid(cell_from_index({12, 10}), g);
  auto stop = [](const GeoPoint& p) { return StopEvent{p, 0, 300, 10}; };
  const std::vector<StopEvent> stops = {stop(c1), stop(c1), stop(c2), stop(c1)};
  const auto seq = stops_to_cell_sequence("v", 0, stops, g);
  REQUIRE(seq.cells.size() == 3);
  CHECK(seq.cells[0] == cell_of(c1, g));
  CHECK(seq.cells[1] == cell_of(c2, g));
  CHECK(seq.cells[2] == cell_of(c1, g));
  CHECK(stops_to_cell_sequence("v", 0, {}, g).cells.empty());
  CHECK(stops_to_cell_sequence("v", 0, std::vector<StopEvent>{stop(c2)}, g).cells.size() == 1);
}

TEST_CASE("extract_stop_sequences keeps input order for any thread count") {
  std::vector<RawTrajectory> trajs;
  for (int v = 0; v < 40; ++v) {
    RawTrajectory t{"v" + std::to_string(v), 17318, {}};
    for (int leg = 0; leg < 3; ++leg) {
      auto d = dwell(offset_m(kHere, 150.0 * (v + leg), 90.0 * leg), kT0 + leg * 2000, 300 + 30 * v);
      t.points.insert(t.points.end(), d.begin(), d.end());
    }
    trajs.push_back(std::move(t));
  }
  const GridSpec g{30.0};
  const auto one = extract_stop_sequences(trajs, {}, g, 1);
  const auto four = extract_stop_sequences(trajs, {}, g, 4);
  REQUIRE(one.size() == trajs.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].sequence.vehicle_id == trajs[i].vehicle_id);
    CHECK(one[i].sequence.cells == four[i].sequence.cells);
    CHECK(one[i].stops.size() == 3);
  }
}

TEST_CASE("cell sequence files round-trip") {
  const std::vector<CellSequence> seqs = {{"a", 17318, {CellId{1}, CellId{99}, CellId{1}}},
                                          {"b", 17319, {CellId{~std::uint64_t{0}}}}};
  std::stringstream buf;
  write_cell_sequences(buf, seqs);
  const auto back = read_cell_sequences(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].cells == seqs[0].cells);
  CHECK(back[0].day == 17318);
  CHECK(back[1].cells == seqs[1].cells);
}
