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

#include "placevec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace placevec {

namespace {

// Geofabrik POI codes of the categories used by default.
const SynthCategory kKnownCategories[] = {
    {"pharmacy", 2101},    {"supermarket", 2501}, {"restaurant", 2301}, {"convenience", 2511},
    {"car_repair", 2562}, {"fuel", 5250},        {"bar", 2305},
};

std::string padded_id(char prefix, std::size_t i, std::size_t n) {
  int width = 1;
  for (std::size_t m = n > 0 ? n - 1 : 0; m >= 10; m /= 10) ++width;
  width = std::max(width, 4);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, i);
  return buf;
}

struct LocalFrame {
  GeoPoint origin;
  double east(const GeoPoint& p) const {
    return (p.lon - origin.lon) * kPi / 180.0 * kEarthRadius * std::cos(origin.lat * kPi / 180.0);
  }
  double north(const GeoPoint& p) const { return (p.lat - origin.lat) * kPi / 180.0 * kEarthRadius; }
};

std::size_t sample_index(Rng& rng, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0) return i;
  }
  return 0;
}

}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.n_categories < 1 || cfg.places_per_category < 1 || cfg.n_agents < 1 || cfg.days < 1) {
    throw std::invalid_argument("synth: counts must be >= 1");
  }
  if (!(cfg.world_extent_m > 0) || !(cfg.agent_activity_radius_m > 0) || !(cfg.cell_size > 0)) {
    throw std::invalid_argument("synth: extents and radii must be > 0");
  }
  if (!(cfg.visits_per_day_mean > 0)) throw std::invalid_argument("synth: visits_per_day_mean must be > 0");
  if (!(cfg.dwell_min_minutes >= 6.0) || !(cfg.dwell_max_minutes >= cfg.dwell_min_minutes)) {
    throw std::invalid_argument("synth: dwell range must satisfy 6 <= min <= max minutes");
  }
  if (!(cfg.gps_noise_sigma_m >= 0)) throw std::invalid_argument("synth: gps noise sigma must be >= 0");
  if (!(cfg.grammar_strength >= 0 && cfg.grammar_strength <= 1)) {
    throw std::invalid_argument("synth: grammar_strength must be in [0, 1]");
  }
  if (!(cfg.travel_speed_mps > 0) || cfg.travel_interval_s < 1 || cfg.dwell_interval_s < 1) {
    throw std::invalid_argument("synth: travel speed and sampling intervals must be positive");
  }
  if (!is_valid(cfg.origin)) throw std::invalid_argument("synth: origin outside the Mercator domain");
}

World generate_world(const SynthConfig& cfg) {
  validate(cfg);
  World w;
  const auto k = static_cast<std::size_t>(cfg.n_categories);
  for (std::size_t c = 0; c < k; ++c) {
    if (c < std::size(kKnownCategories)) {
      w.categories.push_back(kKnownCategories[c]);
    } else {
      w.categories.push_back({"category_" + std::to_string(c), 9000 + static_cast<int>(c)});
    }
  }

  // A route tends to stay with one kind of customer: each category's
  // characteristic successor is itself.
  w.transitions = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k),
                                            (1.0 - cfg.grammar_strength) / static_cast<double>(k));
  w.transitions.diagonal().array() += cfg.grammar_strength;

  // places, with bucketed minimum-separation rejection
  const GridSpec grid{cfg.cell_size};
  const double separation = 2.0 * cfg.cell_size;
  const double bucket = separation * 1.1;
  const LocalFrame frame{cfg.origin};
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> buckets;
  const std::size_t total = k * static_cast<std::size_t>(cfg.places_per_category);
  const std::size_t max_attempts = 1000 * total;
  Rng place_rng(derive_seed(cfg.seed, {2}));
  std::size_t attempts = 0;
  while (w.places.size() < total) {
    if (++attempts > max_attempts) {
      throw std::runtime_error("synth: cannot place " + std::to_string(total) + " places at " +
                               std::to_string(separation) + " m separation in a " +
                               std::to_string(cfg.world_extent_m) + " m world");
    }
    const double e = (uniform01(place_rng) - 0.5) * cfg.world_extent_m;
    const double n = (uniform01(place_rng) - 0.5) * cfg.world_extent_m;
    const CellId cell = cell_of(offset_m(cfg.origin, e, n), grid);
    const GeoPoint pos = cell_centroid(cell, grid);
    const long long bx = static_cast<long long>(std::floor(frame.east(pos) / bucket));
    const long long by = static_cast<long long>(std::floor(frame.north(pos) / bucket));
    bool ok = true;
    for (long long dx = -1; dx <= 1 && ok; ++dx) {
      for (long long dy = -1; dy <= 1 && ok; ++dy) {
        const auto it = buckets.find({bx + dx, by + dy});
        if (it == buckets.end()) continue;
        for (const std::size_t other : it->second) {
          if (distance_m(pos, w.places[other].pos) < separation) {
            ok = false;
            break;
          }
        }
      }
    }
    if (!ok) continue;
    Place p;
    p.id = padded_id('p', w.places.size(), total);
    p.pos = pos;
    p.category = static_cast<int>(w.places.size() / static_cast<std::size_t>(cfg.places_per_category));
    p.cell = cell;
    buckets[{bx, by}].push_back(w.places.size());
    w.places.push_back(std::move(p));
  }

  Rng agent_rng(derive_seed(cfg.seed, {3}));
  for (std::size_t a = 0; a < static_cast<std::size_t>(cfg.n_agents); ++a) {
    Agent agent;
    agent.id = padded_id('v', a, static_cast<std::size_t>(cfg.n_agents));
    const double e = (uniform01(agent_rng) - 0.5) * cfg.world_extent_m;
    const double n = (uniform01(agent_rng) - 0.5) * cfg.world_extent_m;
    agent.home = offset_m(cfg.origin, e, n);
    agent.activity_radius_m = cfg.agent_activity_radius_m;
    for (std::size_t p = 0; p < w.places.size(); ++p) {
      if (distance_m(agent.home, w.places[p].pos) <= agent.activity_radius_m) agent.reachable.push_back(p);
    }
    w.agents.push_back(std::move(agent));
  }
  return w;
}

namespace {

GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double f) {
  return {a.lon + (b.lon - a.lon) * f, a.lat + (b.lat - a.lat) * f};
}

void emit_travel(const std::string& vehicle, const GeoPoint& from, const GeoPoint& to, UnixSeconds& t,
                 const SynthConfig& cfg, std::vector<WaypointRecord>& out) {
  // No samples while parking or pulling out, so travel never blurs a dwell.
  constexpr double kApproachM = 100.0;
  const double length = distance_m(from, to);
  const double duration = length / cfg.travel_speed_mps;
  for (double s = cfg.travel_interval_s; s < duration; s += cfg.travel_interval_s) {
    const double along = s * cfg.travel_speed_mps;
    if (along < kApproachM || length - along < kApproachM) continue;
    out.push_back({vehicle, t + static_cast<UnixSeconds>(s), lerp(from, to, s / duration)});
  }
  t += static_cast<UnixSeconds>(std::ceil(duration));
}

}  // namespace

void emit_itinerary(const World& world, const SynthConfig& cfg, std::size_t agent, const std::vector<std::size_t>& places,
                    UnixSeconds t0, Rng& rng, SynthTrace& trace) {
  const Agent& a = world.agents[agent];
  std::normal_distribution<double> noise(0.0, 1.0);
  UnixSeconds t = t0;
  GeoPoint here = a.home;
  const DayNumber day = day_of(t0);
  for (const std::size_t p : places) {
    const Place& place = world.places[p];
    emit_travel(a.id, here, place.pos, t, cfg, trace.waypoints);
    const double minutes = cfg.dwell_min_minutes + uniform01(rng) * (cfg.dwell_max_minutes - cfg.dwell_min_minutes);
    const auto steps = static_cast<UnixSeconds>(std::floor(minutes * 60.0 / cfg.dwell_interval_s));
    const UnixSeconds arrive = t;
    for (UnixSeconds s = 0; s <= steps; ++s) {
      GeoPoint pos = place.pos;
      if (cfg.gps_noise_sigma_m > 0) {
        const double e = noise(rng) * cfg.gps_noise_sigma_m;
        const double n = noise(rng) * cfg.gps_noise_sigma_m;
        pos = offset_m(place.pos, e, n);
      }
      trace.waypoints.push_back({a.id, t + s * cfg.dwell_interval_s, pos});
    }
    t += steps * cfg.dwell_interval_s;
    trace.visits.push_back({agent, day, p, arrive, t});
    here = place.pos;
  }
  emit_travel(a.id, here, a.home, t, cfg, trace.waypoints);
}

SynthTrace generate_trajectories(const World& world, const SynthConfig& cfg) {
  validate(cfg);
  SynthTrace trace;
  const auto k = static_cast<Eigen::Index>(world.categories.size());
  const DayNumber first_day = day_of(cfg.start);
  for (std::size_t a = 0; a < world.agents.size(); ++a) {
    const Agent& agent = world.agents[a];
    if (agent.reachable.empty()) {
      trace.warnings.push_back("agent " + agent.id + " has no place within " +
                               std::to_string(agent.activity_radius_m) + " m of home; skipped");
      continue;
    }
    std::vector<std::vector<std::size_t>> by_category(static_cast<std::size_t>(k));
    for (const std::size_t p : agent.reachable) by_category[static_cast<std::size_t>(world.places[p].category)].push_back(p);

    for (int d = 0; d < cfg.days; ++d) {
      Rng rng(derive_seed(cfg.seed, {4, a, static_cast<std::uint64_t>(d)}));
      std::poisson_distribution<int> visit_count(cfg.visits_per_day_mean);
      int visits = visit_count(rng);
      if (visits == 0) continue;
      if (agent.reachable.size() == 1) visits = 1;

      std::vector<std::size_t> itinerary;
      std::size_t current = world.places.size();
      int category = -1;
      for (int v = 0; v < visits; ++v) {
        std::vector<double> weights(static_cast<std::size_t>(k));
        for (Eigen::Index c = 0; c < k; ++c) {
          weights[static_cast<std::size_t>(c)] =
              category < 0 ? 1.0 : world.transitions(static_cast<Eigen::Index>(category), c);
        }
        const std::size_t next_category = sample_index(rng, weights);
        std::vector<std::size_t> candidates;
        for (const std::size_t p : by_category[next_category]) {
          if (p != current) candidates.push_back(p);
        }
        if (candidates.empty()) {
          for (const std::size_t p : agent.reachable) {
            if (p != current) candidates.push_back(p);
          }
        }
        const std::size_t chosen = candidates[uniform_index(rng, candidates.size())];
        itinerary.push_back(chosen);
        current = chosen;
        category = world.places[chosen].category;
      }

      const UnixSeconds day_start = (first_day + d) * 86400;
      const UnixSeconds t0 = day_start + 7 * 3600 + static_cast<UnixSeconds>(uniform_index(rng, 3600));
      // keep the trace inside its UTC day: drop visits that could run past 23:00
      const double worst_visit_s = cfg.dwell_max_minutes * 60.0 + 2.0 * cfg.agent_activity_radius_m / cfg.travel_speed_mps;
      const auto budget = static_cast<std::size_t>(std::max(1.0, (16.0 * 3600.0 - 3600.0) / worst_visit_s));
      if (itinerary.size() > budget) itinerary.resize(budget);
      emit_itinerary(world, cfg, a, itinerary, t0, rng, trace);
    }
  }
  return trace;
}

void write_ground_truth(std::ostream& out, const World& world) {
  out << "place_id,lon,lat,category,cell_morton\n";
  char buf[64];
  for (const auto& p : world.places) {
    std::snprintf(buf, sizeof(buf), ",%.8f,%.8f,", p.pos.lon, p.pos.lat);
    out << p.id << buf << world.categories[static_cast<std::size_t>(p.category)].name << ',' << p.cell.code << '\n';
  }
}

std::vector<PoiRecord> world_pois(const World& world) {
  std::vector<PoiRecord> pois;
  pois.reserve(world.places.size());
  for (const auto& p : world.places) {
    const auto& cat = world.categories[static_cast<std::size_t>(p.category)];
    pois.push_back({p.id, p.pos, cat.code, cat.name});
  }
  return pois;
}

}  // namespace placevec
