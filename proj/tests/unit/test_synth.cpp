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

#include <map>
#include <sstream>

#include "placevec/stops.hpp"
#include "placevec/synth.hpp"

using namespace placevec;

namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.n_agents = 30;
  cfg.days = 8;
  cfg.world_extent_m = 10000.0;
  cfg.agent_activity_radius_m = 3000.0;
  return cfg;
}

std::string csv_of(const SynthTrace& trace) {
  std::ostringstream out;
  write_waypoints(out, trace.waypoints);
  return out.str();
}

}  // namespace

TEST_CASE("generate_world: counts, determinism and separation") {
  const SynthConfig cfg;
  const World w = generate_world(cfg);
  REQUIRE(w.places.size() == 200);
  std::map<int, int> per_category;
  for (const auto& p : w.places) ++per_category[p.category];
  CHECK(per_category.size() == 4);
  for (const auto& [c, n] : per_category) CHECK(n == 50);
  CHECK(w.agents.size() == 100);
  CHECK(w.transitions.rows() == 4);
  CHECK((w.transitions.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);

  const World again = generate_world(cfg);
  for (std::size_t i = 0; i < w.places.size(); ++i) {
    CHECK(again.places[i].pos.lon == w.places[i].pos.lon);
    CHECK(again.places[i].cell == w.places[i].cell);
  }
  double closest = 1e300;
  for (std::size_t i = 0; i < w.places.size(); ++i) {
    CHECK(cell_of(w.places[i].pos, GridSpec{cfg.cell_size}) == w.places[i].cell);
    for (std::size_t j = i + 1; j < w.places.size(); ++j) closest = std::min(closest, distance_m(w.places[i].pos, w.places[j].pos));
  }
  CHECK(closest >= 60.0);
}

TEST_CASE("generate_world fails when the extent cannot hold the places") {
  SynthConfig cfg;
  cfg.world_extent_m = 300.0;
  CHECK_THROWS_AS(generate_world(cfg), std::runtime_error);
  cfg = SynthConfig{};
  cfg.n_agents = 0;
  CHECK_THROWS_AS(generate_world(cfg), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.dwell_min_minutes = 5.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("a known noiseless itinerary is recovered as three stops at the places") {
  SynthConfig cfg = small_config();
  cfg.gps_noise_sigma_m = 0.0;
  cfg.dwell_min_minutes = cfg.dwell_max_minutes = 10.0;
  const World w = generate_world(cfg);
  const Agent& agent = w.agents[0];
  REQUIRE(agent.reachable.size() >= 3);
  std::vector<std::size_t> chosen;
  for (const std::size_t p : agent.reachable) {
    bool far = true;
    for (const std::size_t q : chosen) far = far && distance_m(w.places[p].pos, w.places[q].pos) > 200.0;
    if (far) chosen.push_back(p);
    if (chosen.size() == 3) break;
  }
  REQUIRE(chosen.size() == 3);
  SynthTrace trace;
  Rng rng(1);
  emit_itinerary(w, cfg, 0, chosen, cfg.start + 8 * 3600, rng, trace);
  const auto stops = detect_stops(std::span<const WaypointRecord>(trace.waypoints));
  REQUIRE(stops.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(cell_of(stops[i].centroid, GridSpec{cfg.cell_size}) == w.places[chosen[i]].cell);
    CHECK(distance_m(stops[i].centroid, w.places[chosen[i]].pos) < 1e-6);
    CHECK(stops[i].duration() == 600);
  }
}

TEST_CASE("generate_trajectories: determinism, radius bound and valid CSV") {
  const SynthConfig cfg = small_config();
  const World w = generate_world(cfg);
  const SynthTrace a = generate_trajectories(w, cfg);
  const SynthTrace b = generate_trajectories(w, cfg);
  CHECK(csv_of(a) == csv_of(b));
  CHECK_FALSE(a.visits.empty());
  for (const auto& v : a.visits) {
    const Agent& agent = w.agents[v.agent];
    CHECK(distance_m(agent.home, w.places[v.place].pos) <= agent.activity_radius_m);
    CHECK(v.t_depart - v.t_arrive >= 360);
    CHECK(day_of(v.t_depart) == v.day);
  }
  std::istringstream in(csv_of(a));
  const auto parsed = parse_waypoints(in, ParseMode::strict);
  CHECK(parsed.records.size() == a.waypoints.size());
  for (std::size_t i = 1; i < a.waypoints.size(); ++i) {
    const auto& p = a.waypoints[i - 1];
    const auto& q = a.waypoints[i];
    if (p.vehicle_id == q.vehicle_id) CHECK(p.t < q.t);
  }
}

TEST_CASE("visits survive the stops pipeline at 5 m noise") {
  const SynthConfig cfg = small_config();
  const World w = generate_world(cfg);
  const SynthTrace trace = generate_trajectories(w, cfg);
  const auto trajs = segment_trajectories(trace.waypoints);
  const auto found = extract_stop_sequences(trajs, {}, GridSpec{cfg.cell_size});
  std::map<std::pair<std::string, DayNumber>, const std::vector<StopEvent>*> by_day;
  for (std::size_t k = 0; k < trajs.size(); ++k) by_day[{trajs[k].vehicle_id, trajs[k].day}] = &found[k].stops;
  std::size_t recovered = 0;
  for (const auto& v : trace.visits) {
    const auto it = by_day.find({w.agents[v.agent].id, v.day});
    if (it == by_day.end()) continue;
    for (const auto& s : *it->second) {
      if (s.t_start <= v.t_depart && s.t_end >= v.t_arrive &&
          cell_of(s.centroid, GridSpec{cfg.cell_size}) == w.places[v.place].cell) {
        ++recovered;
        break;
      }
    }
  }
  CHECK(static_cast<double>(recovered) >= 0.99 * static_cast<double>(trace.visits.size()));
}

TEST_CASE("agents without reachable places are skipped with a warning") {
  SynthConfig cfg = small_config();
  cfg.places_per_category = 1;
  cfg.agent_activity_radius_m = 50.0;
  cfg.n_agents = 5;
  const World w = generate_world(cfg);
  const SynthTrace t = generate_trajectories(w, cfg);
  CHECK(t.warnings.size() == 5);
  CHECK(t.waypoints.empty());
}

TEST_CASE("ground truth and POI exports") {
  const SynthConfig cfg = small_config();
  const World w = generate_world(cfg);
  std::ostringstream gt;
  write_ground_truth(gt, w);
  std::istringstream lines(gt.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "place_id,lon,lat,category,cell_morton");
  const auto pois = world_pois(w);
  REQUIRE(pois.size() == w.places.size());
  CHECK(pois[0].code == 2101);
  CHECK(pois[0].category == "pharmacy");
  const auto labels = label_cells(pois, GridSpec{cfg.cell_size});
  CHECK(labels.size() == w.places.size());
}
