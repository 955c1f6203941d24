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
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "placevec/geo.hpp"
#include "placevec/stops.hpp"

namespace placevec {

class EmptyVocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cell vocabulary. Indices are dense and ordered by descending count, then
/// ascending Morton code.
class Vocab {
 public:
  Vocab() = default;
  /// Tokens must be unique; they are re-sorted into canonical order.
  Vocab(std::vector<CellId> tokens, std::vector<std::uint64_t> counts);
  /// Keeps the given order, e.g. the row order of a saved embedding file.
  static Vocab from_ordered(std::vector<CellId> tokens, std::vector<std::uint64_t> counts);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  CellId token(std::size_t index) const { return tokens_[index]; }
  std::uint64_t count(std::size_t index) const { return counts_[index]; }
  std::uint64_t total_count() const { return total_; }
  const std::vector<CellId>& tokens() const { return tokens_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::optional<std::uint32_t> index_of(CellId token) const;
  bool contains(CellId token) const { return index_.count(token) != 0; }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  void append(CellId token, std::uint64_t count);

  std::vector<CellId> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<CellId, std::uint32_t> index_;
  std::uint64_t total_ = 0;
};

struct Corpus {
  std::vector<std::vector<std::uint32_t>> sequences;
  Vocab vocab;

  std::size_t token_count() const;
};

struct CorpusStats {
  std::size_t n_sequences = 0;
  std::size_t n_cells = 0;
  double mean_len = 0.0;
  double stddev_len = 0.0;
};

/// Counts post-collapse cell occurrences and keeps cells with count >= min_count.
/// Throws EmptyVocabularyError when nothing survives.
Vocab build_vocab(std::span<const std::vector<CellId>> seqs, std::uint64_t min_count = 5);
Vocab build_vocab(std::span<const CellSequence> seqs, std::uint64_t min_count = 5);

/// Maps cells to vocabulary indices. Out-of-vocabulary cells are dropped, the
/// adjacent repeats that this exposes are collapsed again, and sequences
/// shorter than two tokens are dropped.
Corpus encode_corpus(std::span<const std::vector<CellId>> seqs, const Vocab& vocab);
Corpus encode_corpus(std::span<const CellSequence> seqs, const Vocab& vocab);

/// Population statistics of sequence lengths. Throws on an empty corpus.
CorpusStats corpus_stats(const Corpus& corpus);

/// One sequence per line, space-separated decimal Morton codes.
void write_corpus(std::ostream& out, const Corpus& corpus);
std::vector<std::vector<CellId>> read_corpus(std::istream& in);

/// `token count` per line in vocabulary order.
void write_vocab(std::ostream& out, const Vocab& vocab);
Vocab read_vocab(std::istream& in);

}  // namespace placevec
