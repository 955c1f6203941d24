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

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "placevec/corpus.hpp"
#include "placevec/geo.hpp"

namespace placevec {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

struct TrainConfig {
  int dim = 20;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  double unigram_power = 0.75;
  /// Frequent-cell subsampling threshold; 0 disables.
  double subsample_t = 0.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

void validate(const TrainConfig& cfg);

/// Cell embeddings. `input` rows are the published vectors; `output` rows are
/// the context weights used only during training.
struct EmbeddingModel {
  Vocab vocab;
  Matrix input;
  Matrix output;

  std::size_t size() const { return static_cast<std::size_t>(input.rows()); }
  int dim() const { return static_cast<int>(input.cols()); }
  /// Throws std::out_of_range when the cell is not in the vocabulary.
  std::uint32_t index_of(CellId cell) const;
  auto vector(CellId cell) const { return input.row(index_of(cell)); }
};

struct EpochLog {
  int epoch = 0;
  std::uint64_t pairs = 0;
  double mean_loss = 0.0;
};

struct TrainLog {
  std::uint64_t total_pairs = 0;
  std::vector<EpochLog> epochs;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Skip-gram with negative sampling.
///
/// For every center position a window size is drawn uniformly from
/// [1, cfg.window]; each (center, context) pair in that window is trained
/// against cfg.negatives draws from the unigram^unigram_power distribution.
/// The learning rate decays linearly from lr_start to lr_end over the exact
/// number of pairs of the run, which is counted up front by replaying the
/// per-sentence window draws. Every sentence of every epoch has its own
/// random streams derived from cfg.seed, so threads = 1 is bit-reproducible.
/// With threads > 1 workers update the shared matrices without locking.
EmbeddingModel train_sgns(const Corpus& corpus, const TrainConfig& cfg, TrainLog* log = nullptr);

/// dot / (na * nb), clamped to [-1, 1].
inline double cosine_from_parts(double dot, double norm_a, double norm_b) {
  return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
  const auto na = a.norm();
  const auto nb = b.norm();
  if (na == 0 || nb == 0) throw std::invalid_argument("cosine_similarity: zero-norm vector");
  return cosine_from_parts(a.dot(b), na, nb);
}

/// Row norms of `m`, evaluated the same way cosine_similarity does.
std::vector<double> row_norms(const Matrix& m);

struct Neighbor {
  CellId cell;
  double similarity = 0.0;
};

/// Exact top-k by cosine similarity over input vectors, excluding the target.
/// Ties go to the smaller Morton code.
std::vector<Neighbor> top_k(const EmbeddingModel& model, CellId target, std::size_t k);

/// First line `|V| dim`, then `token v1 .. v_dim` per row with 9 significant digits.
void save_vectors(std::ostream& out, const Vocab& vocab, const Matrix& vectors);
void save_embeddings(const EmbeddingModel& model, std::ostream& input_out, std::ostream& output_out);
void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path);

/// Reads the text format. Counts of the returned vocabulary are zero and its
/// order is the file's row order.
EmbeddingModel load_embeddings(std::istream& input_in, std::istream* output_in = nullptr);
EmbeddingModel load_embeddings(const std::filesystem::path& path);

/// `<path>.context`, holding the output vectors.
std::filesystem::path context_sidecar(const std::filesystem::path& path);

}  // namespace placevec
