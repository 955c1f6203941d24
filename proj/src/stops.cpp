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

#include "placevec/stops.hpp"

#include <atomic>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "placevec/text.hpp"

namespace placevec {

void validate(const StopParams& p) {
  if (!(p.min_duration_s > 0.0)) throw std::invalid_argument("stop min_duration must be > 0");
  if (!(p.radius_m > 0.0)) throw std::invalid_argument("stop radius must be > 0");
  if (p.max_noise_run < 0) throw std::invalid_argument("stop max_noise_run must be >= 0");
}

std::vector<StopEvent> detect_stops(std::span<const WaypointRecord> points, const StopParams& params) {
  validate(params);
  std::vector<StopEvent> stops;
  const std::size_t n = points.size();
  const double max_gap = 2.0 * params.min_duration_s;

  std::size_t i = 0;
  while (i < n) {
    double sum_lon = points[i].pos.lon;
    double sum_lat = points[i].pos.lat;
    std::size_t count = 1;
    UnixSeconds t_first = points[i].t;
    UnixSeconds t_last = points[i].t;
    int noise_run = 0;
    std::size_t first_outlier = 0;
    std::size_t next = n;

    for (std::size_t j = i + 1; j < n; ++j) {
      if (static_cast<double>(points[j].t - points[j - 1].t) > max_gap) {
        next = j;
        break;
      }
      const GeoPoint centroid{sum_lon / static_cast<double>(count), sum_lat / static_cast<double>(count)};
      if (distance_m(points[j].pos, centroid) <= params.radius_m) {
        sum_lon += points[j].pos.lon;
        sum_lat += points[j].pos.lat;
        ++count;
        t_last = points[j].t;
        noise_run = 0;
      } else {
        if (noise_run == 0) first_outlier = j;
        if (++noise_run > params.max_noise_run) break;
      }
    }
    // outliers that never rejoined the cluster are re-examined as a new cluster
    if (noise_run > 0) next = first_outlier;

    if (static_cast<double>(t_last - t_first) >= params.min_duration_s) {
      StopEvent stop;
      stop.centroid = {sum_lon / static_cast<double>(count), sum_lat / static_cast<double>(count)};
      stop.t_start = t_first;
      stop.t_end = t_last;
      stop.n_points = count;
      stops.push_back(stop);
    }
    i = next;
  }
  return stops;
}

std::vector<CellId> stops_to_cells(std::span<const StopEvent> stops, const GridSpec& grid) {
  std::vector<CellId> cells;
  cells.reserve(stops.size());
  for (const auto& s : stops) {
    const CellId c = cell_of(s.centroid, grid);
    if (cells.empty() || cells.back() != c) cells.push_back(c);
  }
  return cells;
}

CellSequence stops_to_cell_sequence(const std::string& vehicle_id, DayNumber day, std::span<const StopEvent> stops,
                                    const GridSpec& grid) {
  return {vehicle_id, day, stops_to_cells(stops, grid)};
}

std::vector<TrajectoryStops> extract_stop_sequences(const std::vector<RawTrajectory>& trajectories,
                                                    const StopParams& params, const GridSpec& grid,
                                                    unsigned threads) {
  validate(params);
  std::vector<TrajectoryStops> out(trajectories.size());
  auto work = [&](std::size_t k) {
    const RawTrajectory& traj = trajectories[k];
    out[k].stops = detect_stops(traj, params);
    out[k].sequence = stops_to_cell_sequence(traj.vehicle_id, traj.day, out[k].stops, grid);
  };
  if (threads <= 1 || trajectories.size() < 2) {
    for (std::size_t k = 0; k < trajectories.size(); ++k) work(k);
    return out;
  }
  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = cursor++; k < trajectories.size(); k = cursor++) work(k);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

void write_stops_csv(std::ostream& out, const std::vector<RawTrajectory>& trajectories,
                     const std::vector<TrajectoryStops>& stops) {
  out << "vehicle_id,day,t_start,t_end,lon,lat,n_points\n";
  char buf[96];
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const std::string day = format_day(trajectories[k].day);
    for (const auto& s : stops[k].stops) {
      std::snprintf(buf, sizeof(buf), ",%.8f,%.8f,%zu\n", s.centroid.lon, s.centroid.lat, s.n_points);
      out << trajectories[k].vehicle_id << ',' << day << ',' << format_iso8601(s.t_start) << ','
          << format_iso8601(s.t_end) << buf;
    }
  }
}

void write_cell_sequences(std::ostream& out, const std::vector<CellSequence>& seqs) {
  out << "vehicle_id,day,cells\n";
  for (const auto& s : seqs) {
    out << s.vehicle_id << ',' << format_day(s.day) << ',';
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
      if (i) out << ' ';
      out << s.cells[i].code;
    }
    out << '\n';
  }
}

std::vector<CellSequence> read_cell_sequences(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("cell sequence file is empty: missing header");
  const auto cols = header_columns(line, {"vehicle_id", "day", "cells"});
  std::vector<CellSequence> seqs;
  std::vector<std::string_view> fields;
  std::vector<std::string_view> tokens;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    split(trim(line), ',', fields);
    if (fields.size() < 3) throw FormatError("cell sequence line " + std::to_string(line_no) + ": too few fields");
    CellSequence seq;
    seq.vehicle_id = std::string(trim(fields[cols[0]]));
    const auto day = parse_day(fields[cols[1]]);
    if (!day) throw FormatError("cell sequence line " + std::to_string(line_no) + ": bad day");
    seq.day = *day;
    split_ws(fields[cols[2]], tokens);
    for (const auto tok : tokens) {
      const auto code = parse_int<std::uint64_t>(tok);
      if (!code) throw FormatError("cell sequence line " + std::to_string(line_no) + ": bad cell id");
      seq.cells.push_back(CellId{*code});
    }
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

}  // namespace placevec
