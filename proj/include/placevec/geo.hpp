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

#include <compare>
#include <cstdint>
#include <functional>
#include <utility>

namespace placevec {

inline constexpr double kPi = 3.14159265358979323846;
/// Sphere radius of spherical (Web) Mercator.
inline constexpr double kMercatorRadius = 6378137.0;
/// Mean Earth radius used for great-circle distances.
inline constexpr double kEarthRadius = 6371000.0;
inline constexpr double kMaxMercatorLat = 85.05113;
inline constexpr double kMercatorExtent = 20037508.35;

/// WGS84 longitude/latitude in degrees.
struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Web Mercator easting/northing in meters.
struct ProjectedPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Square grid over the Mercator plane. Cells are cell_size Mercator meters
/// wide, which is cell_size * cos(lat) meters on the ground.
struct GridSpec {
  double cell_size = 30.0;
};

/// Signed grid index of a cell.
struct GridIndex {
  std::int64_t ix = 0;
  std::int64_t iy = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Morton (Z-order) code of a grid cell. Indices are shifted by 2^31 before
/// interleaving so negative indices map into the unsigned code space.
struct CellId {
  std::uint64_t code = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

bool is_valid(const GeoPoint& p);

/// Spherical Web Mercator forward transform. Throws std::domain_error for
/// non-finite or out-of-range coordinates.
ProjectedPoint project(const GeoPoint& p);
GeoPoint unproject(const ProjectedPoint& p);

constexpr std::uint64_t morton_spread(std::uint32_t v) {
  std::uint64_t x = v;
  x = (x | (x << 16)) & 0x0000FFFF0000FFFFull;
  x = (x | (x << 8)) & 0x00FF00FF00FF00FFull;
  x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x << 2)) & 0x3333333333333333ull;
  x = (x | (x << 1)) & 0x5555555555555555ull;
  return x;
}

constexpr std::uint32_t morton_compact(std::uint64_t x) {
  x &= 0x5555555555555555ull;
  x = (x | (x >> 1)) & 0x3333333333333333ull;
  x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x >> 4)) & 0x00FF00FF00FF00FFull;
  x = (x | (x >> 8)) & 0x0000FFFF0000FFFFull;
  x = (x | (x >> 16)) & 0x00000000FFFFFFFFull;
  return static_cast<std::uint32_t>(x);
}

/// Bit k of ix goes to bit 2k, bit k of iy to bit 2k+1.
constexpr std::uint64_t morton_encode(std::uint32_t ix, std::uint32_t iy) {
  return morton_spread(ix) | (morton_spread(iy) << 1);
}

constexpr std::pair<std::uint32_t, std::uint32_t> morton_decode(std::uint64_t code) {
  return {morton_compact(code), morton_compact(code >> 1)};
}

/// Throws std::domain_error if the index does not fit a signed 32-bit range.
CellId cell_from_index(const GridIndex& index);
GridIndex cell_index(CellId cell);

GridIndex grid_index_of(const ProjectedPoint& p, const GridSpec& grid);
CellId cell_of(const ProjectedPoint& p, const GridSpec& grid);
inline CellId cell_of(const GeoPoint& p, const GridSpec& grid) { return cell_of(project(p), grid); }

ProjectedPoint cell_center_projected(CellId cell, const GridSpec& grid);
GeoPoint cell_centroid(CellId cell, const GridSpec& grid);

/// Haversine great-circle distance on a sphere of radius kEarthRadius.
double distance_m(const GeoPoint& a, const GeoPoint& b);

/// Euclidean distance between the Mercator projections.
double plane_distance_m(const GeoPoint& a, const GeoPoint& b);

enum class DistanceMetric { haversine, plane };

double distance_m(const GeoPoint& a, const GeoPoint& b, DistanceMetric metric);

/// Offset a point by east/north meters on the local tangent plane.
GeoPoint offset_m(const GeoPoint& origin, double east_m, double north_m);

}  // namespace placevec

template <>
struct std::hash<placevec::CellId> {
  std::size_t operator()(const placevec::CellId& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.code);
  }
};
