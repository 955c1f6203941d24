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
#include <span>
#include <string>
#include <vector>

#include "placevec/geo.hpp"
#include "placevec/ingest.hpp"

namespace placevec {

struct StopParams {
  double min_duration_s = 300.0;
  double radius_m = 50.0;
  int max_noise_run = 2;
};

void validate(const StopParams& p);

struct StopEvent {
  GeoPoint centroid;
  UnixSeconds t_start = 0;
  UnixSeconds t_end = 0;
  std::size_t n_points = 0;

  UnixSeconds duration() const { return t_end - t_start; }
};

struct CellSequence {
  std::string vehicle_id;
  DayNumber day = 0;
  std::vector<CellId> cells;
};

/// Centroid-anchored sequential clustering.
///
/// A cluster grows while each new waypoint lies within radius_m of the running
/// centroid. Up to max_noise_run consecutive outliers are tolerated: they are
/// left out of the centroid and the cluster resumes when a later point falls
/// back inside the radius. One more outlier closes the cluster and clustering
/// restarts at the first outlier of the run. A time gap larger than twice
/// min_duration between consecutive waypoints also closes the cluster. Closed
/// clusters spanning at least min_duration become stops.
std::vector<StopEvent> detect_stops(std::span<const WaypointRecord> points, const StopParams& params = {});
inline std::vector<StopEvent> detect_stops(const RawTrajectory& traj, const StopParams& params = {}) {
  return detect_stops(std::span<const WaypointRecord>(traj.points), params);
}

/// Geocode stop centroids and collapse runs of equal consecutive cells.
std::vector<CellId> stops_to_cells(std::span<const StopEvent> stops, const GridSpec& grid);
CellSequence stops_to_cell_sequence(const std::string& vehicle_id, DayNumber day, std::span<const StopEvent> stops,
                                    const GridSpec& grid);

struct TrajectoryStops {
  std::vector<StopEvent> stops;
  CellSequence sequence;
};

/// Runs detect_stops and stops_to_cell_sequence over every trajectory. Output
/// order matches input order for any thread count.
std::vector<TrajectoryStops> extract_stop_sequences(const std::vector<RawTrajectory>& trajectories,
                                                    const StopParams& params, const GridSpec& grid,
                                                    unsigned threads = 1);

/// `vehicle_id,day,t_start,t_end,lon,lat,n_points`
void write_stops_csv(std::ostream& out, const std::vector<RawTrajectory>& trajectories,
                     const std::vector<TrajectoryStops>& stops);

/// `vehicle_id,day,cells` with cells as space-separated decimal Morton codes.
void write_cell_sequences(std::ostream& out, const std::vector<CellSequence>& seqs);
std::vector<CellSequence> read_cell_sequences(std::istream& in);

}  // namespace placevec
