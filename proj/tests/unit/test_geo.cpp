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
#include <stdexcept>

#include "placevec/geo.hpp"

using namespace placevec;

namespace {

// Bit-by-bit interleave, written independently of the magic-number version.
std::uint64_t interleave_loop(std::uint32_t ix, std::uint32_t iy) {
  std::uint64_t code = 0;
  for (int b = 0; b < 32; ++b) {
    code |= static_cast<std::uint64_t>((ix >> b) & 1u) << (2 * b);
    code |= static_cast<std::uint64_t>((iy >> b) & 1u) << (2 * b + 1);
  }
  return code;
}

}  // namespace

TEST_CASE("project fixes the origin and maps the antimeridian to R*pi") {
  const ProjectedPoint o = project({0.0, 0.0});
  CHECK(o.x == 0.0);
  CHECK(std::abs(o.y) < 1e-9);
  const long double x = 6378137.0L * std::acos(-1.0L);
  const ProjectedPoint e = project({180.0, 0.0});
  CHECK(e.x == doctest::Approx(static_cast<double>(x)).epsilon(1e-15));
  CHECK(e.x == doctest::Approx(20037508.3428).epsilon(1e-11));
  CHECK(std::abs(e.y) < 1e-9);
}

TEST_CASE("project reaches the Mercator extent at the latitude limit") {
  const long double phi = 85.0511287798L * std::acos(-1.0L) / 180.0L;
  const long double y = 6378137.0L * std::log(std::tan(std::acos(-1.0L) / 4.0L + phi / 2.0L));
  const ProjectedPoint p = project({0.0, 85.0511287798});
  CHECK(p.x == 0.0);
  CHECK(p.y == doctest::Approx(static_cast<double>(y)).epsilon(1e-13));
  CHECK(std::abs(p.y - 20037508.34) < 0.01);
}

TEST_CASE("project rejects latitudes outside the Mercator domain") {
  CHECK_THROWS_AS(project({0.0, 89.0}), std::domain_error);
  CHECK_THROWS_AS(project({0.0, -86.0}), std::domain_error);
  CHECK_THROWS_AS(project({0.0, std::nan("")}), std::domain_error);
}

TEST_CASE("unproject inverts project") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lon(-180.0, 180.0), lat(-85.0, 85.0);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint p{lon(rng), lat(rng)};
    const GeoPoint q = unproject(project(p));
    CHECK(q.lon == doctest::Approx(p.lon).epsilon(1e-12));
    CHECK(q.lat == doctest::Approx(p.lat).epsilon(1e-12));
  }
}

TEST_CASE("cell_of floors projected coordinates") {
  const GridSpec g{30.0};
  auto idx = [&](double x, double y) { return cell_index(cell_of(ProjectedPoint{x, y}, g)); };
  CHECK(idx(0, 0).ix == 0);
  CHECK(idx(0, 0).iy == 0);
  CHECK(idx(-0.5, -0.5).ix == -1);
  CHECK(idx(-0.5, -0.5).iy == -1);
  CHECK(idx(45.0, 29.999).ix == 1);
  CHECK(idx(45.0, 29.999).iy == 0);
}

TEST_CASE("cell_from_index rejects indices outside the biased 32-bit range") {
  CHECK_THROWS_AS(cell_from_index({std::int64_t{1} << 31, 0}), std::domain_error);
  CHECK_THROWS_AS(cell_from_index({0, -(std::int64_t{1} << 31) - 1}), std::domain_error);
  CHECK_NOTHROW(cell_from_index({(std::int64_t{1} << 31) - 1, -(std::int64_t{1} << 31)}));
}

TEST_CASE("morton examples") {
  CHECK(morton_encode(0, 0) == 0);
  CHECK(morton_encode(1, 1) == 3);
  CHECK(morton_encode(5, 3) == 27);
  CHECK(morton_decode(0) == std::pair<std::uint32_t, std::uint32_t>{0, 0});
  CHECK(morton_decode(3) == std::pair<std::uint32_t, std::uint32_t>{1, 1});
  CHECK(morton_decode(27) == std::pair<std::uint32_t, std::uint32_t>{5, 3});
  static_assert(morton_encode(5, 3) == 27);
}

TEST_CASE("morton matches the bit-loop oracle and round-trips") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100000; ++i) {
    const auto ix = static_cast<std::uint32_t>(rng());
    const auto iy = static_cast<std::uint32_t>(rng());
    const std::uint64_t code = morton_encode(ix, iy);
    REQUIRE(code == interleave_loop(ix, iy));
    REQUIRE(morton_decode(code) == std::pair{ix, iy});
  }
  CHECK(morton_encode(0xFFFFFFFFu, 0xFFFFFFFFu) == ~std::uint64_t{0});
}

TEST_CASE("cell index round-trips through the code for signed indices") {
  for (const GridIndex gi : {GridIndex{0, 0}, GridIndex{-1, -1}, GridIndex{123456, -98765}}) {
    const GridIndex back = cell_index(cell_from_index(gi));
    CHECK(back.ix == gi.ix);
    CHECK(back.iy == gi.iy);
  }
}

TEST_CASE("cell_centroid is the unprojected cell center") {
  const GridSpec g{30.0};
  const GeoPoint c0 = cell_centroid(cell_from_index({0, 0}), g);
  const GeoPoint e0 = unproject({15.0, 15.0});
  CHECK(c0.lon == e0.lon);
  CHECK(c0.lat == e0.lat);
  const GeoPoint c1 = cell_centroid(cell_from_index({-1, -1}), g);
  const GeoPoint e1 = unproject({-15.0, -15.0});
  CHECK(c1.lon == e1.lon);
  CHECK(c1.lat == e1.lat);
  CHECK(cell_of(c1, g) == cell_from_index({-1, -1}));
}

TEST_CASE("haversine distance") {
  const GeoPoint a{23.7, 37.9};
  CHECK(distance_m(a, a) == 0.0);
  const double oracle = 2.0 * std::acos(-1.0) * 6371000.0 / 360.0;
  CHECK(distance_m({0.0, 0.0}, {0.0, 1.0}) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(distance_m({0.0, 0.0}, {0.0, 1.0}) - 111194.93) < 0.005);
  CHECK(distance_m({10.0, 20.0}, {-30.0, 40.0}) == doctest::Approx(distance_m({-30.0, 40.0}, {10.0, 20.0})));
}

TEST_CASE("plane distance is the Euclidean Mercator distance") {
  const GeoPoint a{0.0, 0.0}, b{0.0, 1.0};
  const ProjectedPoint pb = project(b);
  CHECK(plane_distance_m(a, b) == doctest::Approx(std::hypot(pb.x, pb.y)));
  CHECK(distance_m(a, b, DistanceMetric::plane) == plane_distance_m(a, b));
  CHECK(distance_m(a, b, DistanceMetric::haversine) == distance_m(a, b));
}

TEST_CASE("offset_m moves by the requested local distance") {
  const GeoPoint o{23.7275, 37.9838};
  CHECK(distance_m(o, offset_m(o, 300.0, 400.0)) == doctest::Approx(500.0).epsilon(1e-4));
  CHECK(distance_m(o, offset_m(o, 0.0, -1000.0)) == doctest::Approx(1000.0).epsilon(1e-6));
}
