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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "placevec/geo.hpp"
#include "placevec/text.hpp"

namespace placevec {

/// Seconds since 1970-01-01T00:00:00Z.
using UnixSeconds = std::int64_t;
/// Days since 1970-01-01 (UTC, or shifted by a day offset).
using DayNumber = std::int64_t;

/// Parses `YYYY-MM-DDTHH:MM:SSZ`.
std::optional<UnixSeconds> parse_iso8601(std::string_view s);
std::string format_iso8601(UnixSeconds t);
std::string format_day(DayNumber day);
std::optional<DayNumber> parse_day(std::string_view s);
UnixSeconds from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, int second = 0);

/// Calendar day of t after shifting by offset_hours (0 = UTC day).
DayNumber day_of(UnixSeconds t, int offset_hours = 0);

struct WaypointRecord {
  std::string vehicle_id;
  UnixSeconds t = 0;
  GeoPoint pos;
};

struct RawTrajectory {
  std::string vehicle_id;
  DayNumber day = 0;
  std::vector<WaypointRecord> points;
};

/// Column names of the waypoint CSV. Columns are located by header name, so
/// extra columns and any column order are accepted.
struct WaypointCsvFormat {
  std::string vehicle_id = "vehicle_id";
  std::string timestamp = "timestamp";
  std::string lon = "lon";
  std::string lat = "lat";
  char delimiter = ',';
};

struct WaypointParseResult {
  std::vector<WaypointRecord> records;
  std::size_t skipped = 0;
};

/// Reads a waypoint CSV. Throws FormatError on a missing header, and in
/// strict mode on the first malformed row (message carries the line number).
WaypointParseResult parse_waypoints(std::istream& in, ParseMode mode = ParseMode::lenient,
                                    const WaypointCsvFormat& format = {});

void write_waypoints(std::ostream& out, const std::vector<WaypointRecord>& records);

/// Groups records by (vehicle_id, day) and sorts each group by time with
/// stable tie order. Output is ordered by vehicle_id then day.
std::vector<RawTrajectory> segment_trajectories(std::vector<WaypointRecord> records, int day_offset_hours = 0);

}  // namespace placevec
