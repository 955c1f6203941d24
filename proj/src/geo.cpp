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

#include "placevec/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace placevec {

namespace {

constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;
constexpr std::int64_t kBias = std::int64_t{1} << 31;

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -kMaxMercatorLat && p.lat <= kMaxMercatorLat;
}

ProjectedPoint project(const GeoPoint& p) {
  if (!is_valid(p)) {
    throw std::domain_error("coordinate outside the Mercator domain: lon=" + std::to_string(p.lon) +
                            " lat=" + std::to_string(p.lat));
  }
  const double lambda = p.lon * kDegToRad;
  const double phi = p.lat * kDegToRad;
  return {kMercatorRadius * lambda, kMercatorRadius * std::log(std::tan(kPi / 4.0 + phi / 2.0))};
}

GeoPoint unproject(const ProjectedPoint& p) {
  const double lon = p.x / kMercatorRadius * kRadToDeg;
  const double lat = (2.0 * std::atan(std::exp(p.y / kMercatorRadius)) - kPi / 2.0) * kRadToDeg;
  return {lon, lat};
}

CellId cell_from_index(const GridIndex& index) {
  const auto in_range = [](std::int64_t v) {
    return v >= -kBias && v < kBias;
  };
  if (!in_range(index.ix) || !in_range(index.iy)) {
    throw std::domain_error("grid index outside the 32-bit cell range");
  }
  return CellId{morton_encode(static_cast<std::uint32_t>(index.ix + kBias),
                              static_cast<std::uint32_t>(index.iy + kBias))};
}

GridIndex cell_index(CellId cell) {
  const auto [ux, uy] = morton_decode(cell.code);
  return {static_cast<std::int64_t>(ux) - kBias, static_cast<std::int64_t>(uy) - kBias};
}

GridIndex grid_index_of(const ProjectedPoint& p, const GridSpec& grid) {
  const double fx = std::floor(p.x / grid.cell_size);
  const double fy = std::floor(p.y / grid.cell_size);
  constexpr double kLimit = 9.0e18;
  if (!std::isfinite(fx) || !std::isfinite(fy) || std::abs(fx) > kLimit || std::abs(fy) > kLimit) {
    throw std::domain_error("projected point cannot be gridded");
  }
  return {static_cast<std::int64_t>(fx), static_cast<std::int64_t>(fy)};
}

CellId cell_of(const ProjectedPoint& p, const GridSpec& grid) {
  return cell_from_index(grid_index_of(p, grid));
}

ProjectedPoint cell_center_projected(CellId cell, const GridSpec& grid) {
  const GridIndex idx = cell_index(cell);
  return {(static_cast<double>(idx.ix) + 0.5) * grid.cell_size,
          (static_cast<double>(idx.iy) + 0.5) * grid.cell_size};
}

GeoPoint cell_centroid(CellId cell, const GridSpec& grid) {
  return unproject(cell_center_projected(cell, grid));
}

double distance_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

double plane_distance_m(const GeoPoint& a, const GeoPoint& b) {
  const ProjectedPoint pa = project(a);
  const ProjectedPoint pb = project(b);
  return std::hypot(pa.x - pb.x, pa.y - pb.y);
}

double distance_m(const GeoPoint& a, const GeoPoint& b, DistanceMetric metric) {
  return metric == DistanceMetric::plane ? plane_distance_m(a, b) : distance_m(a, b);
}

GeoPoint offset_m(const GeoPoint& origin, double east_m, double north_m) {
  const double lat = origin.lat + north_m / kEarthRadius * kRadToDeg;
  const double lon = origin.lon + east_m / (kEarthRadius * std::cos(origin.lat * kDegToRad)) * kRadToDeg;
  return {lon, lat};
}

}  // namespace placevec
