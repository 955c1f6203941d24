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

#include "placevec/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>
#include <unordered_map>

namespace placevec {

namespace {

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t y;
  unsigned m;
  unsigned d;
};

Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

bool valid_date(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const int limit = kDays[m - 1] + (m == 2 && leap ? 1 : 0);
  return d <= limit;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

UnixSeconds from_civil(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::optional<UnixSeconds> parse_iso8601(std::string_view s) {
  s = trim(s);
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' ||
      s[19] != 'Z') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, se;
  if (!digits(s, 0, 4, y) || !digits(s, 5, 2, mo) || !digits(s, 8, 2, d) || !digits(s, 11, 2, h) ||
      !digits(s, 14, 2, mi) || !digits(s, 17, 2, se)) {
    return std::nullopt;
  }
  if (!valid_date(y, mo, d) || h > 23 || mi > 59 || se > 59) return std::nullopt;
  return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, se);
}

std::string format_iso8601(UnixSeconds t) {
  const std::int64_t day = floor_div(t, 86400);
  const std::int64_t sod = t - day * 86400;
  const Civil c = civil_from_days(day);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(c.y), c.m, c.d,
                static_cast<long long>(sod / 3600), static_cast<long long>((sod / 60) % 60),
                static_cast<long long>(sod % 60));
  return buf;
}

std::string format_day(DayNumber day) {
  const Civil c = civil_from_days(day);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", static_cast<long long>(c.y), c.m, c.d);
  return buf;
}

std::optional<DayNumber> parse_day(std::string_view s) {
  s = trim(s);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y, m, d;
  if (!digits(s, 0, 4, y) || !digits(s, 5, 2, m) || !digits(s, 8, 2, d) || !valid_date(y, m, d)) {
    return std::nullopt;
  }
  return days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

DayNumber day_of(UnixSeconds t, int offset_hours) {
  return floor_div(t + static_cast<std::int64_t>(offset_hours) * 3600, 86400);
}

WaypointParseResult parse_waypoints(std::istream& in, ParseMode mode, const WaypointCsvFormat& format) {
  WaypointParseResult result;
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("waypoint CSV is empty: missing header");
  }
  std::string_view header = line;
  if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const std::vector<std::size_t> cols =
      header_columns(header, {format.vehicle_id, format.timestamp, format.lon, format.lat});
  const std::size_t needed = *std::max_element(cols.begin(), cols.end()) + 1;

  std::vector<std::string_view> fields;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    split(row, format.delimiter, fields);
    const char* problem = nullptr;
    WaypointRecord rec;
    if (fields.size() < needed) {
      problem = "too few fields";
    } else {
      const auto vid = trim(fields[cols[0]]);
      const auto t = parse_iso8601(fields[cols[1]]);
      const auto lon = parse_double(fields[cols[2]]);
      const auto lat = parse_double(fields[cols[3]]);
      if (vid.empty()) {
        problem = "empty vehicle_id";
      } else if (!t) {
        problem = "unparseable timestamp";
      } else if (!lon || !lat) {
        problem = "unparseable coordinate";
      } else {
        rec.vehicle_id = std::string(vid);
        rec.t = *t;
        rec.pos = {*lon, *lat};
        if (!is_valid(rec.pos)) problem = "coordinate out of range";
      }
    }
    if (problem) {
      if (mode == ParseMode::strict) {
        throw FormatError("waypoint CSV line " + std::to_string(line_no) + ": " + problem);
      }
      ++result.skipped;
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

void write_waypoints(std::ostream& out, const std::vector<WaypointRecord>& records) {
  out << "vehicle_id,timestamp,lon,lat\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), ",%.8f,%.8f\n", r.pos.lon, r.pos.lat);
    out << r.vehicle_id << ',' << format_iso8601(r.t) << buf;
  }
}

std::vector<RawTrajectory> segment_trajectories(std::vector<WaypointRecord> records, int day_offset_hours) {
  std::vector<RawTrajectory> out;
  if (records.empty()) return out;

  // Rank vehicle ids lexicographically once instead of comparing strings in the sort.
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<const std::string*> names;
  std::vector<std::uint32_t> vehicle(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(records[i].vehicle_id, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(&it->first);
    vehicle[i] = it->second;
  }
  std::vector<std::uint32_t> order(names.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return *names[a] < *names[b]; });
  std::vector<std::uint32_t> rank(names.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  struct Key {
    std::uint32_t vehicle;
    DayNumber day;
    UnixSeconds t;
    std::size_t index;
  };
  std::vector<Key> keys(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    keys[i] = {rank[vehicle[i]], day_of(records[i].t, day_offset_hours), records[i].t, i};
  }
  // index as the last key component keeps input order among equal timestamps
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return std::tie(a.vehicle, a.day, a.t, a.index) < std::tie(b.vehicle, b.day, b.t, b.index);
  });

  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i == 0 || keys[i].vehicle != keys[i - 1].vehicle || keys[i].day != keys[i - 1].day) {
      RawTrajectory traj;
      traj.vehicle_id = records[keys[i].index].vehicle_id;
      traj.day = keys[i].day;
      out.push_back(std::move(traj));
    }
    out.back().points.push_back(std::move(records[keys[i].index]));
  }
  return out;
}

}  // namespace placevec
