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

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "placevec/geo.hpp"
#include "placevec/ingest.hpp"
#include "placevec/poi.hpp"
#include "placevec/random.hpp"

namespace placevec {

struct SynthConfig {
  int n_categories = 4;
  int places_per_category = 50;
  /// Side of the square world in meters.
  double world_extent_m = 20000.0;
  int n_agents = 100;
  int days = 60;
  double agent_activity_radius_m = 5000.0;
  double visits_per_day_mean = 7.0;
  double dwell_min_minutes = 6.0;
  double dwell_max_minutes = 30.0;
  double gps_noise_sigma_m = 5.0;
  std::uint64_t seed = 1;

  GeoPoint origin{23.7275, 37.9838};
  double cell_size = 30.0;
  UnixSeconds start = 1496275200;  // 2017-06-01T00:00:00Z
  /// Extra probability mass on staying in the current category.
  double grammar_strength = 0.7;
  double travel_speed_mps = 10.0;
  int travel_interval_s = 60;
  int dwell_interval_s = 30;
};

void validate(const SynthConfig& cfg);

struct SynthCategory {
  std::string name;
  int code = 0;
};

struct Place {
  std::string id;
  GeoPoint pos;
  int category = 0;
  CellId cell;
};

struct Agent {
  std::string id;
  GeoPoint home;
  double activity_radius_m = 0.0;
  /// Indices of places within the activity radius, ascending.
  std::vector<std::size_t> reachable;
};

/// Places, agents and the category grammar: a Markov transition matrix over
/// categories. Row c puts grammar_strength on c itself, so a vehicle's errands
/// of one day cluster by category, and spreads the rest uniformly.
struct World {
  std::vector<SynthCategory> categories;
  std::vector<Place> places;
  std::vector<Agent> agents;
  Eigen::MatrixXd transitions;
};

/// Places are drawn uniformly over the extent, snapped to the centroid of
/// their grid cell and rejected if closer than two cell widths to an earlier
/// place. Throws std::runtime_error if the separation cannot be met.
World generate_world(const SynthConfig& cfg);

struct Visit {
  std::size_t agent = 0;
  DayNumber day = 0;
  std::size_t place = 0;
  UnixSeconds t_arrive = 0;
  UnixSeconds t_depart = 0;
};

struct SynthTrace {
  std::vector<WaypointRecord> waypoints;
  std::vector<Visit> visits;
  std::vector<std::string> warnings;
};

/// Per agent and day: a Poisson number of visits whose categories follow the
/// grammar, each to a reachable place other than the current one; 30-s dwell
/// waypoints with Gaussian noise and sparse travel waypoints in between.
/// Waypoints are ordered by agent, day and time.
SynthTrace generate_trajectories(const World& world, const SynthConfig& cfg);

/// Waypoints for one agent-day following a fixed list of place indices,
/// starting at `t0`. Used by generate_trajectories.
void emit_itinerary(const World& world, const SynthConfig& cfg, std::size_t agent, const std::vector<std::size_t>& places,
                    UnixSeconds t0, Rng& rng, SynthTrace& trace);

/// `place_id,lon,lat,category,cell_morton`
void write_ground_truth(std::ostream& out, const World& world);
std::vector<PoiRecord> world_pois(const World& world);

}  // namespace placevec
