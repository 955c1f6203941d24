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

#include "placevec/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "placevec/random.hpp"

namespace placevec {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::vector<NamedRange> default_decay_ranges() {
  return {{"overall", {}}, {"local", {0.0, 50000.0}}, {"long_range", {3.0e6, std::numeric_limits<double>::infinity()}}};
}

std::vector<CellId> sample_from(std::vector<CellId> population, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  if (population.empty()) throw std::invalid_argument("cannot sample from an empty population");
  std::sort(population.begin(), population.end());
  if (population.size() <= n) return population;
  Rng rng(derive_seed(seed, {0x5A3D1E}));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + uniform_index(rng, population.size() - i);
    std::swap(population[i], population[j]);
  }
  population.resize(n);
  std::sort(population.begin(), population.end());
  return population;
}

std::vector<CellId> sample_cells(const EmbeddingModel& model, std::size_t n, std::uint64_t seed,
                                 const CellLabelMap* labels, const std::optional<std::string>& category) {
  std::vector<CellId> population;
  for (const CellId c : model.vocab.tokens()) {
    if (category) {
      if (!labels) throw std::invalid_argument("sample_cells: a category filter needs cell labels");
      const auto it = labels->find(c);
      if (it == labels->end() || it->second != *category) continue;
    }
    population.push_back(c);
  }
  if (population.empty()) {
    throw std::invalid_argument(category ? "no cells in the model carry label '" + *category + "'"
                                         : std::string("cannot sample from an empty model"));
  }
  return sample_from(std::move(population), n, seed);
}

NeighborReport neighbor_report(const EmbeddingModel& model, const CellLabelMap& labels, const GridSpec& grid,
                               CellId target, std::size_t k, DistanceMetric metric) {
  NeighborReport report;
  report.target = target;
  report.target_label = label_of(labels, target);
  report.target_centroid = cell_centroid(target, grid);
  for (const Neighbor& n : top_k(model, target, k)) {
    NeighborEntry e;
    e.cell = n.cell;
    e.similarity = n.similarity;
    e.label = label_of(labels, n.cell);
    e.centroid = cell_centroid(n.cell, grid);
    e.distance_m = distance_m(report.target_centroid, e.centroid, metric);
    report.neighbors.push_back(std::move(e));
  }
  return report;
}

SimilaritySets intra_inter_similarities(const EmbeddingModel& model, const std::vector<CellId>& category_cells,
                                        const std::vector<CellId>& other_cells) {
  const auto norms = row_norms(model.input);
  auto sim = [&](CellId a, CellId b) {
    const auto ia = model.index_of(a);
    const auto ib = model.index_of(b);
    if (norms[ia] == 0.0 || norms[ib] == 0.0) throw std::invalid_argument("zero-norm embedding vector");
    return cosine_from_parts(model.input.row(ia).dot(model.input.row(ib)), norms[ia], norms[ib]);
  };
  SimilaritySets sets;
  sets.intra.reserve(category_cells.size() * (category_cells.size() - 1) / 2);
  for (std::size_t i = 0; i < category_cells.size(); ++i) {
    for (std::size_t j = i + 1; j < category_cells.size(); ++j) sets.intra.push_back(sim(category_cells[i], category_cells[j]));
  }
  sets.inter.reserve(category_cells.size() * other_cells.size());
  for (const CellId a : category_cells) {
    for (const CellId b : other_cells) sets.inter.push_back(sim(a, b));
  }
  return sets;
}

CategoryTestResult category_similarity_test(const EmbeddingModel& model, const CellLabelMap& labels,
                                            const std::string& category, std::size_t n, std::uint64_t seed) {
  std::vector<CellId> in_category;
  std::vector<CellId> others;
  for (const CellId c : model.vocab.tokens()) {
    const auto it = labels.find(c);
    if (it == labels.end() || it->second == kMixedLabel) continue;
    (it->second == category ? in_category : others).push_back(c);
  }
  if (in_category.size() < 2) {
    throw std::invalid_argument("category '" + category + "' has " + std::to_string(in_category.size()) +
                                " labelled cells in the model; need at least 2");
  }
  if (others.size() < 2) {
    throw std::invalid_argument("fewer than 2 cells with other single-category labels to compare '" + category + "' with");
  }
  const std::uint64_t stream = fnv1a(category);
  const auto sc = sample_from(in_category, n, derive_seed(seed, {stream, 1}));
  const auto so = sample_from(others, sc.size(), derive_seed(seed, {stream, 2}));

  const SimilaritySets sets = intra_inter_similarities(model, sc, so);
  const auto intra = sample_moments(std::span<const double>(sets.intra));
  const auto inter = sample_moments(std::span<const double>(sets.inter));
  if (intra.n < 2 || inter.n < 2) throw std::invalid_argument("category test needs at least 2 similarities per set");
  const WelchResult w = welch_t(intra, inter);

  CategoryTestResult r;
  r.category = category;
  r.sample_size = sc.size();
  r.other_size = so.size();
  r.intra_pairs = sets.intra.size();
  r.inter_pairs = sets.inter.size();
  r.intra_mean = intra.mean;
  r.inter_mean = inter.mean;
  r.t_stat = w.t;
  r.df = w.df;
  r.p_two_sided = w.p_two_sided;
  return r;
}

std::vector<std::string> categories_in_model(const EmbeddingModel& model, const CellLabelMap& labels) {
  std::set<std::string> cats;
  for (const CellId c : model.vocab.tokens()) {
    const auto it = labels.find(c);
    if (it != labels.end() && it->second != kMixedLabel) cats.insert(it->second);
  }
  return {cats.begin(), cats.end()};
}

SampleGeometry prepare_sample(const EmbeddingModel& model, const std::vector<CellId>& sample, const GridSpec& grid) {
  SampleGeometry g;
  g.cells = sample;
  g.vectors.resize(static_cast<Eigen::Index>(sample.size()), model.input.cols());
  g.norms.resize(sample.size());
  g.centroids.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    g.vectors.row(r) = model.input.row(model.index_of(sample[i]));
    g.norms[i] = g.vectors.row(r).norm();
    if (g.norms[i] == 0.0) throw std::invalid_argument("zero-norm embedding for cell " + std::to_string(sample[i].code));
    g.centroids[i] = cell_centroid(sample[i], grid);
  }
  return g;
}

std::vector<std::size_t> pair_shard_bounds(std::size_t n, std::size_t shards) {
  shards = std::max<std::size_t>(1, shards);
  std::vector<std::size_t> bounds{0};
  const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n > 0 ? n - 1 : 0);
  double acc = 0.0;
  std::size_t next = 1;
  for (std::size_t i = 0; i < n && next < shards; ++i) {
    acc += static_cast<double>(n - 1 - i);
    if (acc >= total * static_cast<double>(next) / static_cast<double>(shards)) {
      bounds.push_back(i + 1);
      ++next;
    }
  }
  while (bounds.size() < shards + 1) bounds.push_back(n);
  bounds.back() = n;
  return bounds;
}

void pairwise_decay(const EmbeddingModel& model, const std::vector<CellId>& sample, const GridSpec& grid,
                    const DistanceRange& range, DistanceMetric metric,
                    const std::function<void(double, double)>& sink) {
  const SampleGeometry g = prepare_sample(model, sample, grid);
  for_each_pair(g, metric, 0, g.size(), [&](std::size_t, std::size_t, double d, double cs) {
    if (range.contains(d)) sink(d, cs);
  });
}

std::vector<DecayModel> decay_fits(const EmbeddingModel& model, const std::vector<CellId>& sample,
                                   const GridSpec& grid, const std::vector<NamedRange>& ranges,
                                   DistanceMetric metric, unsigned threads) {
  const SampleGeometry g = prepare_sample(model, sample, grid);
  using Accs = std::vector<OlsAccumulator<double>>;
  const auto shards = sharded_pairs<Accs>(
      g, metric, threads, [&] { return Accs(ranges.size()); },
      [&](Accs& accs, std::size_t, std::size_t, double d, double cs) {
        for (std::size_t r = 0; r < ranges.size(); ++r) {
          if (ranges[r].range.contains(d)) accs[r].add(d, cs);
        }
      });
  std::vector<DecayModel> out;
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    OlsAccumulator<double> acc;
    for (const auto& s : shards) acc.merge(s[r]);
    DecayModel m;
    m.name = ranges[r].name;
    m.range = ranges[r].range;
    m.n_pairs = acc.count();
    try {
      m.fit = acc.fit();
    } catch (const std::domain_error&) {
      m.fit.reset();
    }
    out.push_back(std::move(m));
  }
  return out;
}

LinearFit ols_fit(const std::vector<std::pair<double, double>>& points) {
  OlsAccumulator<double> acc;
  for (const auto& [x, y] : points) acc.add(x, y);
  return acc.fit();
}

Variogram empirical_variogram(const EmbeddingModel& model, const std::vector<CellId>& sample, const GridSpec& grid,
                              double bin_width, double max_dist, DistanceMetric metric, unsigned threads) {
  if (!(bin_width > 0.0) || !(max_dist > 0.0) || !std::isfinite(max_dist)) {
    throw std::invalid_argument("variogram: bin width and max distance must be positive and finite");
  }
  const auto n_bins = static_cast<std::size_t>(std::ceil(max_dist / bin_width));
  const SampleGeometry g = prepare_sample(model, sample, grid);

  struct Sums {
    std::vector<double> sum;
    std::vector<std::uint64_t> count;
  };
  const auto shards = sharded_pairs<Sums>(
      g, metric, threads, [&] { return Sums{std::vector<double>(n_bins, 0.0), std::vector<std::uint64_t>(n_bins, 0)}; },
      [&](Sums& s, std::size_t, std::size_t, double d, double cs) {
        if (!(d < max_dist)) return;
        const auto b = std::min(n_bins - 1, static_cast<std::size_t>(d / bin_width));
        s.sum[b] += 1.0 - cs;
        ++s.count[b];
      });

  Variogram v;
  v.bin_width = bin_width;
  v.max_dist = max_dist;
  OlsAccumulator<double> line;
  for (std::size_t b = 0; b < n_bins; ++b) {
    VariogramBin bin;
    bin.h_lo = static_cast<double>(b) * bin_width;
    bin.h_hi = static_cast<double>(b + 1) * bin_width;
    double sum = 0.0;
    for (const auto& s : shards) {
      sum += s.sum[b];
      bin.n_pairs += s.count[b];
    }
    if (bin.n_pairs > 0) {
      bin.gamma = sum / static_cast<double>(bin.n_pairs);
      line.add(bin.h_mid(), bin.gamma);
    }
    v.bins.push_back(bin);
  }
  if (line.count() >= 2) v.fit = line.fit();
  return v;
}

}  // namespace placevec
