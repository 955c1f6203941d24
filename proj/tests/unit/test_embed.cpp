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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "placevec/embed.hpp"
#include "placevec/sgns.hpp"

using namespace placevec;

namespace {

EmbeddingModel planted_model(const Matrix& vectors) {
  std::vector<CellId> tokens;
  std::vector<std::uint64_t> counts;
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    tokens.push_back(CellId{static_cast<std::uint64_t>(1000 + 3 * i)});
    counts.push_back(static_cast<std::uint64_t>(vectors.rows() - i));
  }
  EmbeddingModel m;
  m.vocab = Vocab::from_ordered(tokens, counts);
  m.input = vectors;
  m.output = Matrix::Zero(vectors.rows(), vectors.cols());
  return m;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST_CASE("cosine similarity examples") {
  Eigen::Vector3d v(0.3, -1.2, 2.0);
  CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == 0.0);
  const double oracle = 32.0 / std::sqrt(14.0 * 77.0);
  CHECK(cosine_similarity(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(4, 5, 6)) == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(std::abs(oracle - 0.974631846) < 1e-9);
  CHECK_THROWS_AS(cosine_similarity(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(cosine_similarity(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)), std::invalid_argument);
  CHECK(cosine_similarity(Eigen::Vector2f(1, 1), Eigen::Vector2f(1, 1)) == doctest::Approx(1.0f));
}

TEST_CASE("SGNS gradient matches central finite differences") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 0.5);
  constexpr int dim = 20, negatives = 5;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::RowVectorXd v(dim);
    Eigen::MatrixXd u(negatives + 1, dim);
    for (int j = 0; j < dim; ++j) v(j) = n(rng);
    for (int i = 0; i <= negatives; ++i)
      for (int j = 0; j < dim; ++j) u(i, j) = n(rng);
    const auto g = sgns_gradient(v, u);
    constexpr double h = 1e-6;
    Eigen::RowVectorXd num_v(dim);
    for (int j = 0; j < dim; ++j) {
      Eigen::RowVectorXd vp = v, vm = v;
      vp(j) += h;
      vm(j) -= h;
      num_v(j) = (sgns_loss(vp, u) - sgns_loss(vm, u)) / (2 * h);
    }
    Eigen::MatrixXd num_u(negatives + 1, dim);
    for (int i = 0; i <= negatives; ++i) {
      for (int j = 0; j < dim; ++j) {
        Eigen::MatrixXd up = u, um = u;
        up(i, j) += h;
        um(i, j) -= h;
        num_u(i, j) = (sgns_loss(v, up) - sgns_loss(v, um)) / (2 * h);
      }
    }
    CHECK((g.center - num_v).norm() / num_v.norm() < 1e-5);
    CHECK((Eigen::MatrixXd(g.outputs) - num_u).norm() / num_u.norm() < 1e-5);
  }
}

TEST_CASE("one SGD step equals a gradient step and moves both probabilities the right way") {
  Matrix input(3, 4), output(3, 4);
  input << 0.1, -0.2, 0.3, 0.05, 0.2, 0.1, -0.1, 0.3, -0.3, 0.2, 0.1, 0.0;
  output << 0.0, 0.0, 0.0, 0.0, 0.2, -0.1, 0.4, 0.1, -0.2, 0.3, 0.1, -0.3;
  const double lr = 0.025;
  const std::uint32_t neg[] = {2};
  Eigen::MatrixXd us(2, 4);
  us.row(0) = output.row(1);
  us.row(1) = output.row(2);
  const Eigen::RowVectorXd v0 = input.row(0);
  const auto g = sgns_gradient(v0, us);
  const double pos_before = sigmoid(output.row(1).dot(input.row(0)));
  const double neg_before = sigmoid(output.row(2).dot(input.row(0)));
  RowVector scratch(4);
  const double loss = sgns_step(input, output, 0, 1, neg, lr, scratch);
  CHECK(loss == doctest::Approx(sgns_loss(v0, us)).epsilon(1e-14));
  CHECK((input.row(0) - (v0 - lr * g.center)).norm() < 1e-15);
  CHECK((output.row(1) - (us.row(0) - lr * g.outputs.row(0))).norm() < 1e-15);
  CHECK((output.row(2) - (us.row(1) - lr * g.outputs.row(1))).norm() < 1e-15);
  CHECK(sigmoid(output.row(1).dot(input.row(0))) > pos_before);
  CHECK(sigmoid(output.row(2).dot(input.row(0))) < neg_before);
}

namespace {

// Two tokens that always appear in the same contexts: every sentence is
// [x, A1|A2, y] for one of several (x, y) pairs.
Corpus twin_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Corpus c;
  std::vector<CellId> tokens;
  std::vector<std::uint64_t> counts(12, 1);
  for (std::uint64_t i = 0; i < 12; ++i) tokens.push_back(CellId{i});
  c.vocab = Vocab::from_ordered(tokens, counts);
  for (int s = 0; s < 3000; ++s) {
    const std::uint32_t group = static_cast<std::uint32_t>(rng() % 5);
    const std::uint32_t twin = (rng() % 2) ? 0u : 1u;
    if (group == 0) {
      c.sequences.push_back({2, twin, 3});
    } else {
      // other tokens form their own contexts
      const std::uint32_t a = 4 + static_cast<std::uint32_t>(rng() % 8);
      const std::uint32_t b = 4 + static_cast<std::uint32_t>(rng() % 8);
      const std::uint32_t m = 4 + static_cast<std::uint32_t>(rng() % 8);
      c.sequences.push_back({a, m, b});
    }
  }
  return c;
}

}  // namespace

TEST_CASE("training shape, determinism and twin-token recovery") {
  const Corpus corpus = twin_corpus(99);
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    TrainLog log;
    const EmbeddingModel m = train_sgns(corpus, cfg, &log);
    CHECK(m.input.rows() == 12);
    CHECK(m.input.cols() == cfg.dim);
    CHECK(m.output.rows() == 12);
    CHECK(log.epochs.size() == static_cast<std::size_t>(cfg.epochs));
    std::uint64_t pairs = 0;
    for (const auto& e : log.epochs) pairs += e.pairs;
    CHECK(pairs == log.total_pairs);
    const auto n0 = top_k(m, CellId{0}, 1);
    const auto n1 = top_k(m, CellId{1}, 1);
    hits += (n0[0].cell == CellId{1} && n1[0].cell == CellId{0});
    if (seed == 1) {
      const EmbeddingModel again = train_sgns(corpus, cfg);
      CHECK(again.input == m.input);
      CHECK(again.output == m.output);
    }
  }
  CHECK(hits >= 4);
}

TEST_CASE("training initialisation and errors") {
  TrainConfig cfg;
  cfg.epochs = 1;
  Corpus tiny;
  tiny.vocab = Vocab::from_ordered({CellId{1}}, {5});
  tiny.sequences = {{0, 0}};
  CHECK_THROWS_AS(train_sgns(tiny, cfg), std::invalid_argument);
  cfg.lr_start = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.lr_start = 1e300;
  cfg.lr_end = 1e299;
  CHECK_THROWS_AS(train_sgns(twin_corpus(1), cfg), TrainingDivergedError);
}

TEST_CASE("multi-threaded training completes with finite vectors") {
  TrainConfig cfg;
  cfg.threads = 4;
  const EmbeddingModel m = train_sgns(twin_corpus(3), cfg);
  CHECK(m.input.allFinite());
  CHECK(m.output.allFinite());
}

TEST_CASE("top_k ordering contract") {
  const Matrix vecs = random_matrix(40, 6, 8);
  const EmbeddingModel m = planted_model(vecs);
  const CellId target = m.vocab.token(5);
  CHECK(top_k(m, target, 0).empty());
  const auto all = top_k(m, target, 39);
  REQUIRE(all.size() == 39);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].similarity >= all[i].similarity);
  for (const auto& n : all) CHECK(n.cell != target);

  // full-sort oracle
  std::vector<std::pair<double, std::uint64_t>> oracle;
  for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
    if (i == 5) continue;
    const double s = vecs.row(5).dot(vecs.row(i)) / (vecs.row(5).norm() * vecs.row(i).norm());
    oracle.emplace_back(-s, m.vocab.token(static_cast<std::size_t>(i)).code);
  }
  std::sort(oracle.begin(), oracle.end());
  const auto top = top_k(m, target, 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(top[i].cell.code == oracle[i].second);
    CHECK(top[i].similarity == doctest::Approx(-oracle[i].first).epsilon(1e-14));
  }
  CHECK_THROWS_AS(top_k(m, CellId{1}, 3), std::out_of_range);
  CHECK(top_k(m, target, 1000).size() == 39);
}

TEST_CASE("top_k: a planted duplicate is rank 1 at similarity 1") {
  Matrix vecs = random_matrix(20, 8, 4);
  vecs.row(13) = vecs.row(2) * 3.0;
  const EmbeddingModel m = planted_model(vecs);
  const auto a = top_k(m, m.vocab.token(2), 3);
  const auto b = top_k(m, m.vocab.token(13), 3);
  CHECK(a[0].cell == m.vocab.token(13));
  CHECK(b[0].cell == m.vocab.token(2));
  CHECK(a[0].similarity == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("top_k breaks ties by code") {
  Matrix vecs(4, 2);
  vecs << 1, 0, 0, 1, 0, 1, 0, 1;
  const EmbeddingModel m = planted_model(vecs);
  const auto n = top_k(m, m.vocab.token(0), 3);
  CHECK(n[0].cell.code < n[1].cell.code);
  CHECK(n[1].cell.code < n[2].cell.code);
}

TEST_CASE("embedding files: exact small file and round trips") {
  Matrix one(1, 2);
  one << 0.5, -0.25;
  const EmbeddingModel m = planted_model(one);
  std::ostringstream in_out, ctx_out;
  save_embeddings(m, in_out, ctx_out);
  CHECK(in_out.str() == "1 2\n1000 0.5 -0.25\n");
  std::istringstream in_in(in_out.str()), ctx_in(ctx_out.str());
  const EmbeddingModel back = load_embeddings(in_in, &ctx_in);
  CHECK(back.input == m.input);
  CHECK(back.vocab.tokens() == m.vocab.tokens());

  EmbeddingModel big = planted_model(random_matrix(100, 20, 21));
  big.output = random_matrix(100, 20, 22);
  std::ostringstream a, b;
  save_embeddings(big, a, b);
  std::istringstream ai(a.str()), bi(b.str());
  const EmbeddingModel r = load_embeddings(ai, &bi);
  CHECK((r.input - big.input).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((r.output - big.output).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(r.vocab.tokens() == big.vocab.tokens());
}

TEST_CASE("embedding files: format errors") {
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return load_embeddings(in);
  };
  CHECK_THROWS(load(""));
  CHECK_THROWS(load("2\n"));
  CHECK_THROWS(load("1 2\n5 0.5\n"));
  CHECK_THROWS(load("1 2\n5 0.5 0.1 0.2\n"));
  CHECK_THROWS(load("2 2\n5 0.5 0.1\n"));
  CHECK_THROWS(load("1 2\n5 0.5 0.1\n6 0.5 0.1\n"));
  CHECK_THROWS(load("1 2\nx 0.5 0.1\n"));
  CHECK_NOTHROW(load("1 2\n5 0.5 0.1\n"));
}
