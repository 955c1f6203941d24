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

#include "placevec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "placevec/text.hpp"

namespace placevec {

Vocab::Vocab(std::vector<CellId> tokens, std::vector<std::uint64_t> counts) {
  if (tokens.size() != counts.size()) throw std::invalid_argument("vocab tokens/counts size mismatch");
  std::vector<std::size_t> order(tokens.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return tokens[a] < tokens[b];
  });
  tokens_.reserve(tokens.size());
  counts_.reserve(tokens.size());
  for (const std::size_t k : order) append(tokens[k], counts[k]);
}

Vocab Vocab::from_ordered(std::vector<CellId> tokens, std::vector<std::uint64_t> counts) {
  if (tokens.size() != counts.size()) throw std::invalid_argument("vocab tokens/counts size mismatch");
  Vocab v;
  for (std::size_t k = 0; k < tokens.size(); ++k) v.append(tokens[k], counts[k]);
  return v;
}

void Vocab::append(CellId token, std::uint64_t count) {
  const auto [it, inserted] = index_.emplace(token, static_cast<std::uint32_t>(tokens_.size()));
  if (!inserted) throw std::invalid_argument("duplicate vocab token " + std::to_string(token.code));
  tokens_.push_back(token);
  counts_.push_back(count);
  total_ += count;
}

std::optional<std::uint32_t> Vocab::index_of(CellId token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.size();
  return n;
}

Vocab build_vocab(std::span<const std::vector<CellId>> seqs, std::uint64_t min_count) {
  std::unordered_map<CellId, std::uint64_t> counts;
  for (const auto& seq : seqs) {
    for (const CellId c : seq) ++counts[c];
  }
  std::vector<CellId> tokens;
  std::vector<std::uint64_t> kept;
  for (const auto& [cell, n] : counts) {
    if (n >= min_count) {
      tokens.push_back(cell);
      kept.push_back(n);
    }
  }
  if (tokens.empty()) {
    throw EmptyVocabularyError("no cell reaches min_count=" + std::to_string(min_count) + "; nothing to train");
  }
  return Vocab(std::move(tokens), std::move(kept));
}

namespace {

std::vector<std::vector<CellId>> cells_of(std::span<const CellSequence> seqs) {
  std::vector<std::vector<CellId>> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(s.cells);
  return out;
}

}  // namespace

Vocab build_vocab(std::span<const CellSequence> seqs, std::uint64_t min_count) {
  const auto cells = cells_of(seqs);
  return build_vocab(std::span<const std::vector<CellId>>(cells), min_count);
}

Corpus encode_corpus(std::span<const std::vector<CellId>> seqs, const Vocab& vocab) {
  Corpus corpus;
  corpus.vocab = vocab;
  std::vector<std::uint32_t> encoded;
  for (const auto& seq : seqs) {
    encoded.clear();
    for (const CellId c : seq) {
      const auto idx = vocab.index_of(c);
      if (!idx) continue;
      if (!encoded.empty() && encoded.back() == *idx) continue;
      encoded.push_back(*idx);
    }
    if (encoded.size() >= 2) corpus.sequences.push_back(encoded);
  }
  return corpus;
}

Corpus encode_corpus(std::span<const CellSequence> seqs, const Vocab& vocab) {
  const auto cells = cells_of(seqs);
  return encode_corpus(std::span<const std::vector<CellId>>(cells), vocab);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.sequences.empty()) throw std::invalid_argument("corpus_stats: empty corpus");
  CorpusStats stats;
  stats.n_sequences = corpus.sequences.size();
  for (const auto& s : corpus.sequences) stats.n_cells += s.size();
  stats.mean_len = static_cast<double>(stats.n_cells) / static_cast<double>(stats.n_sequences);
  double ss = 0.0;
  for (const auto& s : corpus.sequences) {
    const double d = static_cast<double>(s.size()) - stats.mean_len;
    ss += d * d;
  }
  stats.stddev_len = std::sqrt(ss / static_cast<double>(stats.n_sequences));
  return stats;
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& seq : corpus.sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out << ' ';
      out << corpus.vocab.token(seq[i]).code;
    }
    out << '\n';
  }
}

std::vector<std::vector<CellId>> read_corpus(std::istream& in) {
  std::vector<std::vector<CellId>> seqs;
  std::string line;
  std::vector<std::string_view> tokens;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    split_ws(line, tokens);
    if (tokens.empty()) continue;
    std::vector<CellId> seq;
    seq.reserve(tokens.size());
    for (const auto tok : tokens) {
      const auto code = parse_int<std::uint64_t>(tok);
      if (!code) throw FormatError("corpus line " + std::to_string(line_no) + ": bad cell id '" + std::string(tok) + "'");
      seq.push_back(CellId{*code});
    }
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

void write_vocab(std::ostream& out, const Vocab& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.token(i).code << ' ' << vocab.count(i) << '\n';
}

Vocab read_vocab(std::istream& in) {
  std::vector<CellId> tokens;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    split_ws(line, fields);
    if (fields.empty()) continue;
    const auto code = fields.size() == 2 ? parse_int<std::uint64_t>(fields[0]) : std::nullopt;
    const auto count = fields.size() == 2 ? parse_int<std::uint64_t>(fields[1]) : std::nullopt;
    if (!code || !count) throw FormatError("vocab line " + std::to_string(line_no) + ": expected 'token count'");
    tokens.push_back(CellId{*code});
    counts.push_back(*count);
  }
  return Vocab(std::move(tokens), std::move(counts));
}

}  // namespace placevec
