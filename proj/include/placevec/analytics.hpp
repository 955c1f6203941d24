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
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "placevec/embed.hpp"
#include "placevec/geo.hpp"
#include "placevec/poi.hpp"
#include "placevec/stats.hpp"

namespace placevec {

/// Half-open distance interval [min_m, max_m).
struct DistanceRange {
  double min_m = 0.0;
  double max_m = std::numeric_limits<double>::infinity();

  bool contains(double d) const { return d >= min_m && d < max_m; }
};

struct NamedRange {
  std::string name;
  DistanceRange range;
};

/// Overall, local (< 50 km) and long-range (>= 3000 km) decay populations.
std::vector<NamedRange> default_decay_ranges();

// ---------------------------------------------------------------------------
// Sampling

/// Uniform sample without replacement from the vocabulary, optionally limited
/// to cells labelled `category`. Returns the whole population when it has at
/// most n cells. Output is sorted by Morton code. Throws std::invalid_argument
/// for n == 0 or an empty population.
std::vector<CellId> sample_cells(const EmbeddingModel& model, std::size_t n, std::uint64_t seed,
                                 const CellLabelMap* labels = nullptr,
                                 const std::optional<std::string>& category = std::nullopt);

/// Same contract over an explicit population.
std::vector<CellId> sample_from(std::vector<CellId> population, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Task 1: neighbor exploration

struct NeighborEntry {
  CellId cell;
  double similarity = 0.0;
  std::string label;
  double distance_m = 0.0;
  GeoPoint centroid;
};

struct NeighborReport {
  CellId target;
  std::string target_label;
  GeoPoint target_centroid;
  std::vector<NeighborEntry> neighbors;
};

NeighborReport neighbor_report(const EmbeddingModel& model, const CellLabelMap& labels, const GridSpec& grid,
                               CellId target, std::size_t k = 10,
                               DistanceMetric metric = DistanceMetric::haversine);

// ---------------------------------------------------------------------------
// Task 2: category similarity test

struct SimilaritySets {
  std::vector<double> intra;
  std::vector<double> inter;
};

/// All unordered pairs within `category_cells`, and all pairs across the two lists.
SimilaritySets intra_inter_similarities(const EmbeddingModel& model, const std::vector<CellId>& category_cells,
                                        const std::vector<CellId>& other_cells);

struct CategoryTestResult {
  std::string category;
  std::size_t sample_size = 0;
  std::size_t other_size = 0;
  std::size_t intra_pairs = 0;
  std::size_t inter_pairs = 0;
  double intra_mean = 0.0;
  double inter_mean = 0.0;
  double t_stat = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
};

/// Samples min(n, |category|) cells of the category and as many cells with a
/// different single-category label (mixed cells excluded), then runs Welch's
/// test of intra-category against cross similarities. Throws
/// std::invalid_argument when either side has fewer than 2 cells.
CategoryTestResult category_similarity_test(const EmbeddingModel& model, const CellLabelMap& labels,
                                            const std::string& category, std::size_t n = 300,
                                            std::uint64_t seed = 1);

/// Distinct single-category labels present among the model's cells, sorted.
std::vector<std::string> categories_in_model(const EmbeddingModel& model, const CellLabelMap& labels);

// ---------------------------------------------------------------------------
// Pair enumeration (Tasks 3 and 4)

/// Vectors, norms and centroids of a cell sample, laid out for pair loops.
struct SampleGeometry {
  std::vector<CellId> cells;
  Matrix vectors;
  std::vector<double> norms;
  std::vector<GeoPoint> centroids;

  std::size_t size() const { return cells.size(); }
  double similarity(std::size_t i, std::size_t j) const {
    return cosine_from_parts(vectors.row(static_cast<Eigen::Index>(i)).dot(vectors.row(static_cast<Eigen::Index>(j))),
                             norms[i], norms[j]);
  }
};

/// Throws std::out_of_range for cells outside the vocabulary and
/// std::invalid_argument for zero-norm vectors.
SampleGeometry prepare_sample(const EmbeddingModel& model, const std::vector<CellId>& sample, const GridSpec& grid);

/// Visits every unordered pair (i < j, row-major) with its distance and
/// cosine similarity.
template <typename Visitor>
void for_each_pair(const SampleGeometry& g, DistanceMetric metric, std::size_t row_begin, std::size_t row_end,
                   Visitor&& visit) {
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      visit(i, j, distance_m(g.centroids[i], g.centroids[j], metric), g.similarity(i, j));
    }
  }
}

/// Splits rows [0, n) into `shards` contiguous blocks with roughly equal pair counts.
std::vector<std::size_t> pair_shard_bounds(std::size_t n, std::size_t shards);

/// Runs `make()`-constructed per-shard states over pair shards in parallel and
/// returns them in shard order; `visit(state, i, j, d, cs)`.
template <typename State, typename Make, typename Visit>
std::vector<State> sharded_pairs(const SampleGeometry& g, DistanceMetric metric, unsigned threads, Make&& make,
                                 Visit&& visit) {
  const std::size_t shards = std::max(1u, threads);
  const auto bounds = pair_shard_bounds(g.size(), shards);
  std::vector<State> states;
  for (std::size_t s = 0; s < shards; ++s) states.push_back(make());
  auto run = [&](std::size_t s) {
    State& st = states[s];
    for_each_pair(g, metric, bounds[s], bounds[s + 1],
                  [&](std::size_t i, std::size_t j, double d, double cs) { visit(st, i, j, d, cs); });
  };
  if (shards == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t s = 0; s < shards; ++s) pool.emplace_back(run, s);
    for (auto& t : pool) t.join();
  }
  return states;
}

/// Streams (distance, cosine similarity) for every pair whose distance lies in
/// `range`. Nothing is materialized.
void pairwise_decay(const EmbeddingModel& model, const std::vector<CellId>& sample, const GridSpec& grid,
                    const DistanceRange& range, DistanceMetric metric,
                    const std::function<void(double, double)>& sink);

struct DecayModel {
  std::string name;
  DistanceRange range;
  std::uint64_t n_pairs = 0;
  /// Empty when the range holds fewer than 2 pairs or a single distance.
  std::optional<LinearFit> fit;
};

/// One OLS fit of similarity on distance per range, from a single pass over
/// the pairs. Shards are merged in order, so results depend only on `threads`.
std::vector<DecayModel> decay_fits(const EmbeddingModel& model, const std::vector<CellId>& sample,
                                   const GridSpec& grid, const std::vector<NamedRange>& ranges,
                                   DistanceMetric metric = DistanceMetric::haversine, unsigned threads = 1);

/// Fit over an explicit (distance, similarity) stream.
LinearFit ols_fit(const std::vector<std::pair<double, double>>& points);

// ---------------------------------------------------------------------------
// Task 4: empirical semi-variogram

struct VariogramBin {
  double h_lo = 0.0;
  double h_hi = 0.0;
  std::uint64_t n_pairs = 0;
  /// Mean of (1 - cosine similarity); NaN for an empty bin.
  double gamma = std::numeric_limits<double>::quiet_NaN();

  double h_mid() const { return 0.5 * (h_lo + h_hi); }
};

struct Variogram {
  double bin_width = 1000.0;
  double max_dist = 100000.0;
  std::vector<VariogramBin> bins;
  /// OLS of gamma on bin midpoint over non-empty bins, when at least two exist.
  std::optional<LinearFit> fit;
};

/// gamma(h) = mean(1 - cos) over pairs with distance in the bin, which is half
/// the mean squared distance between the length-normalized vectors.
Variogram empirical_variogram(const EmbeddingModel& model, const std::vector<CellId>& sample, const GridSpec& grid,
                              double bin_width = 1000.0, double max_dist = 100000.0,
                              DistanceMetric metric = DistanceMetric::haversine, unsigned threads = 1);

}  // namespace placevec
