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

#include "placevec/embed.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "placevec/random.hpp"
#include "placevec/sgns.hpp"
#include "placevec/text.hpp"

namespace placevec {

void validate(const TrainConfig& cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("train: dim must be >= 1");
  if (cfg.window < 1) throw std::invalid_argument("train: window must be >= 1");
  if (cfg.negatives < 1) throw std::invalid_argument("train: negatives must be >= 1");
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(cfg.lr_end > 0.0) || !(cfg.lr_start > cfg.lr_end)) {
    throw std::invalid_argument("train: require lr_start > lr_end > 0");
  }
  if (!(cfg.subsample_t >= 0.0)) throw std::invalid_argument("train: subsample_t must be >= 0");
  if (!std::isfinite(cfg.unigram_power)) throw std::invalid_argument("train: unigram_power must be finite");
}

std::uint32_t EmbeddingModel::index_of(CellId cell) const {
  const auto idx = vocab.index_of(cell);
  if (!idx) throw std::out_of_range("cell " + std::to_string(cell.code) + " is not in the embedding vocabulary");
  return *idx;
}

namespace {

enum Stream : std::uint64_t { kPlanStream = 1, kNegativeStream = 2 };

/// Noise distribution over vocabulary indices, sampled by inverting the CDF.
class UnigramSampler {
 public:
  UnigramSampler(const std::vector<std::uint64_t>& freq, double power) {
    cdf_.resize(freq.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) {
      acc += freq[i] > 0 ? std::pow(static_cast<double>(freq[i]), power) : 0.0;
      cdf_[i] = acc;
    }
  }

  std::uint32_t operator()(Rng& rng) const {
    const double u = uniform01(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  }

 private:
  std::vector<double> cdf_;
};

/// The per-sentence draws that decide which pairs are trained: subsampling
/// keep flags, then one reduced window per kept position.
class SentencePlan {
 public:
  SentencePlan(const TrainConfig& cfg, const std::vector<double>& keep_prob) : cfg_(cfg), keep_prob_(keep_prob) {}

  void draw(const std::vector<std::uint32_t>& sentence, std::uint64_t epoch, std::uint64_t index) {
    Rng rng(derive_seed(cfg_.seed, {kPlanStream, epoch, index}));
    kept_.clear();
    for (const std::uint32_t tok : sentence) {
      if (cfg_.subsample_t > 0.0 && uniform01(rng) >= keep_prob_[tok]) continue;
      kept_.push_back(tok);
    }
    windows_.resize(kept_.size());
    pairs_ = 0;
    const auto n = static_cast<std::ptrdiff_t>(kept_.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto b = static_cast<std::ptrdiff_t>(1 + uniform_index(rng, static_cast<std::uint64_t>(cfg_.window)));
      windows_[i] = static_cast<int>(b);
      pairs_ += static_cast<std::uint64_t>(std::min(i, b) + std::min(n - 1 - i, b));
    }
  }

  const std::vector<std::uint32_t>& kept() const { return kept_; }
  int window(std::size_t i) const { return windows_[i]; }
  std::uint64_t pairs() const { return pairs_; }

 private:
  const TrainConfig& cfg_;
  const std::vector<double>& keep_prob_;
  std::vector<std::uint32_t> kept_;
  std::vector<int> windows_;
  std::uint64_t pairs_ = 0;
};

struct Progress {
  std::atomic<std::uint64_t> pairs_done{0};
  std::uint64_t total_pairs = 1;
};

struct SentenceResult {
  std::uint64_t pairs = 0;
  double loss = 0.0;
};

SentenceResult train_sentence(const std::vector<std::uint32_t>& sentence, std::uint64_t epoch,
                              std::uint64_t index, const TrainConfig& cfg, const UnigramSampler& noise,
                              SentencePlan& plan, Matrix& input, Matrix& output, RowVector& scratch,
                              std::vector<std::uint32_t>& negatives, Progress& progress) {
  plan.draw(sentence, epoch, index);
  Rng rng(derive_seed(cfg.seed, {kNegativeStream, epoch, index}));
  const std::uint64_t base = progress.pairs_done.load(std::memory_order_relaxed);
  const double span = cfg.lr_start - cfg.lr_end;
  const double total = static_cast<double>(progress.total_pairs);

  SentenceResult result;
  const auto& kept = plan.kept();
  const auto n = static_cast<std::ptrdiff_t>(kept.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t b = plan.window(static_cast<std::size_t>(i));
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - b);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + b);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      const std::uint32_t context = kept[static_cast<std::size_t>(j)];
      negatives.clear();
      for (int k = 0; k < cfg.negatives; ++k) {
        const std::uint32_t neg = noise(rng);
        if (neg != context) negatives.push_back(neg);
      }
      const double done = static_cast<double>(base + result.pairs);
      const double lr = std::max(cfg.lr_end, cfg.lr_start - span * done / total);
      const double loss = sgns_step(input, output, kept[static_cast<std::size_t>(i)], context,
                                    std::span<const std::uint32_t>(negatives), lr, scratch);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite loss in epoch " << epoch << ", sentence " << index << ", position " << i
            << " (center index " << kept[static_cast<std::size_t>(i)] << ", context index " << context
            << ", lr " << lr << "); lower lr_start";
        throw TrainingDivergedError(msg.str());
      }
      result.loss += loss;
      ++result.pairs;
    }
  }
  progress.pairs_done.fetch_add(result.pairs, std::memory_order_relaxed);
  return result;
}

}  // namespace

EmbeddingModel train_sgns(const Corpus& corpus, const TrainConfig& cfg, TrainLog* log) {
  validate(cfg);
  const std::size_t vocab_size = corpus.vocab.size();
  if (vocab_size < 2) throw std::invalid_argument("train: vocabulary needs at least 2 cells");
  if (corpus.sequences.empty()) throw std::invalid_argument("train: empty corpus");

  std::vector<std::uint64_t> freq(vocab_size, 0);
  for (const auto& s : corpus.sequences) {
    for (const std::uint32_t t : s) {
      if (t >= vocab_size) throw std::out_of_range("train: corpus index outside the vocabulary");
      ++freq[t];
    }
  }
  const double n_tokens = static_cast<double>(corpus.token_count());
  std::vector<double> keep_prob(vocab_size, 1.0);
  if (cfg.subsample_t > 0.0) {
    const double threshold = cfg.subsample_t * n_tokens;
    for (std::size_t i = 0; i < vocab_size; ++i) {
      if (freq[i] == 0) continue;
      const double f = static_cast<double>(freq[i]);
      keep_prob[i] = (std::sqrt(f / threshold) + 1.0) * threshold / f;
    }
  }

  EmbeddingModel model;
  model.vocab = corpus.vocab;
  const auto rows = static_cast<Eigen::Index>(vocab_size);
  model.input.resize(rows, cfg.dim);
  model.output = Matrix::Zero(rows, cfg.dim);
  Rng init(derive_seed(cfg.seed, {0}));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cfg.dim; ++c) model.input(r, c) = (uniform01(init) - 0.5) / cfg.dim;
  }

  const UnigramSampler noise(freq, cfg.unigram_power);
  Progress progress;
  {
    SentencePlan plan(cfg, keep_prob);
    std::uint64_t total = 0;
    for (int e = 0; e < cfg.epochs; ++e) {
      for (std::size_t s = 0; s < corpus.sequences.size(); ++s) {
        plan.draw(corpus.sequences[s], static_cast<std::uint64_t>(e), s);
        total += plan.pairs();
      }
    }
    progress.total_pairs = std::max<std::uint64_t>(total, 1);
  }
  if (log) {
    log->total_pairs = progress.total_pairs;
    log->epochs.clear();
  }

  const unsigned threads = std::max(1u, cfg.threads);
  for (int e = 0; e < cfg.epochs; ++e) {
    const auto epoch = static_cast<std::uint64_t>(e);
    std::uint64_t epoch_pairs = 0;
    double epoch_loss = 0.0;
    if (threads == 1) {
      SentencePlan plan(cfg, keep_prob);
      RowVector scratch(cfg.dim);
      std::vector<std::uint32_t> negatives;
      for (std::size_t s = 0; s < corpus.sequences.size(); ++s) {
        const auto r = train_sentence(corpus.sequences[s], epoch, s, cfg, noise, plan, model.input, model.output,
                                      scratch, negatives, progress);
        epoch_pairs += r.pairs;
        epoch_loss += r.loss;
      }
    } else {
      std::atomic<std::size_t> cursor{0};
      std::vector<SentenceResult> partial(threads);
      std::vector<std::thread> pool;
      std::exception_ptr failure;
      std::atomic<bool> failed{false};
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            SentencePlan plan(cfg, keep_prob);
            RowVector scratch(cfg.dim);
            std::vector<std::uint32_t> negatives;
            for (std::size_t s = cursor++; s < corpus.sequences.size() && !failed; s = cursor++) {
              const auto r = train_sentence(corpus.sequences[s], epoch, s, cfg, noise, plan, model.input,
                                            model.output, scratch, negatives, progress);
              partial[t].pairs += r.pairs;
              partial[t].loss += r.loss;
            }
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (failure) std::rethrow_exception(failure);
      for (const auto& p : partial) {
        epoch_pairs += p.pairs;
        epoch_loss += p.loss;
      }
    }
    if (log) {
      log->epochs.push_back({e + 1, epoch_pairs, epoch_pairs ? epoch_loss / static_cast<double>(epoch_pairs) : 0.0});
    }
  }
  return model;
}

std::vector<double> row_norms(const Matrix& m) {
  std::vector<double> norms(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) norms[static_cast<std::size_t>(r)] = m.row(r).norm();
  return norms;
}

std::vector<Neighbor> top_k(const EmbeddingModel& model, CellId target, std::size_t k) {
  const std::uint32_t t = model.index_of(target);
  std::vector<Neighbor> out;
  if (k == 0) return out;
  const auto norms = row_norms(model.input);
  if (norms[t] == 0.0) throw std::invalid_argument("top_k: target vector has zero norm");
  const auto v = model.input.row(t);
  out.reserve(model.size() - 1);
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (i == t) continue;
    if (norms[i] == 0.0) throw std::invalid_argument("top_k: zero-norm vector in model");
    const auto r = static_cast<Eigen::Index>(i);
    out.push_back({model.vocab.token(i), cosine_from_parts(model.input.row(r).dot(v), norms[i], norms[t])});
  }
  const auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.cell < b.cell;
  };
  k = std::min(k, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), better);
  out.resize(k);
  return out;
}

void save_vectors(std::ostream& out, const Vocab& vocab, const Matrix& vectors) {
  if (vocab.empty()) throw std::invalid_argument("save_embeddings: empty model");
  if (static_cast<std::size_t>(vectors.rows()) != vocab.size()) {
    throw std::invalid_argument("save_embeddings: row count does not match vocabulary");
  }
  out << vocab.size() << ' ' << vectors.cols() << '\n';
  char buf[32];
  std::string line;
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    line = std::to_string(vocab.token(static_cast<std::size_t>(r)).code);
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), " %.9g", vectors(r, c));
      line += buf;
    }
    line += '\n';
    out << line;
  }
}

void save_embeddings(const EmbeddingModel& model, std::ostream& input_out, std::ostream& output_out) {
  save_vectors(input_out, model.vocab, model.input);
  save_vectors(output_out, model.vocab, model.output);
}

std::filesystem::path context_sidecar(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".context";
  return p;
}

void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream in_file(path, std::ios::binary);
  std::ofstream out_file(context_sidecar(path), std::ios::binary);
  if (!in_file || !out_file) throw std::runtime_error("cannot write embeddings to " + path.string());
  save_embeddings(model, in_file, out_file);
}

namespace {

struct VectorTable {
  std::vector<CellId> tokens;
  Matrix vectors;
};

VectorTable read_vectors(std::istream& in, const char* what) {
  std::string line;
  std::vector<std::string_view> fields;
  if (!std::getline(in, line)) throw FormatError(std::string(what) + ": missing header");
  split_ws(line, fields);
  const auto n = fields.size() == 2 ? parse_int<std::size_t>(fields[0]) : std::nullopt;
  const auto dim = fields.size() == 2 ? parse_int<std::size_t>(fields[1]) : std::nullopt;
  if (!n || !dim || *dim == 0) throw FormatError(std::string(what) + ": malformed header '" + line + "'");
  VectorTable table;
  table.tokens.reserve(*n);
  table.vectors.resize(static_cast<Eigen::Index>(*n), static_cast<Eigen::Index>(*dim));
  for (std::size_t r = 0; r < *n; ++r) {
    if (!std::getline(in, line)) throw FormatError(std::string(what) + ": expected " + std::to_string(*n) + " rows");
    split_ws(line, fields);
    if (fields.size() != *dim + 1) {
      throw FormatError(std::string(what) + " row " + std::to_string(r + 1) + ": expected " +
                        std::to_string(*dim + 1) + " fields, got " + std::to_string(fields.size()));
    }
    const auto code = parse_int<std::uint64_t>(fields[0]);
    if (!code) throw FormatError(std::string(what) + " row " + std::to_string(r + 1) + ": bad token");
    table.tokens.push_back(CellId{*code});
    for (std::size_t c = 0; c < *dim; ++c) {
      const auto v = parse_double(fields[c + 1]);
      if (!v || !std::isfinite(*v)) {
        throw FormatError(std::string(what) + " row " + std::to_string(r + 1) + ": bad component");
      }
      table.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
    }
  }
  while (std::getline(in, line)) {
    if (!trim(line).empty()) throw FormatError(std::string(what) + ": trailing rows after declared count");
  }
  return table;
}

}  // namespace

EmbeddingModel load_embeddings(std::istream& input_in, std::istream* output_in) {
  VectorTable in = read_vectors(input_in, "embedding file");
  EmbeddingModel model;
  model.vocab = Vocab::from_ordered(in.tokens, std::vector<std::uint64_t>(in.tokens.size(), 0));
  model.input = std::move(in.vectors);
  if (output_in) {
    VectorTable out = read_vectors(*output_in, "context embedding file");
    if (out.tokens != in.tokens || out.vectors.cols() != model.input.cols()) {
      throw FormatError("context embedding file does not match the embedding file");
    }
    model.output = std::move(out.vectors);
  } else {
    model.output = Matrix::Zero(model.input.rows(), model.input.cols());
  }
  return model;
}

EmbeddingModel load_embeddings(const std::filesystem::path& path) {
  std::ifstream in_file(path, std::ios::binary);
  if (!in_file) throw std::runtime_error("cannot open embeddings file " + path.string());
  std::ifstream out_file(context_sidecar(path), std::ios::binary);
  return load_embeddings(in_file, out_file ? &out_file : nullptr);
}

}  // namespace placevec
