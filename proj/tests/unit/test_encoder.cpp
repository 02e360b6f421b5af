// Copyright 2026 The Sluice Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <functional>
#include <vector>

#include "diff/rng.hpp"
#include "diff/tape.hpp"
#include "doctest.h"
#include "encoder/lstm.hpp"
#include "encoder/network.hpp"
#include "encoder/vocabulary.hpp"
#include "errors.hpp"
#include "support/finite_diff.hpp"

using namespace sluice;
using namespace sluice::diff;
using namespace sluice::encoder;
using sluice::testing::numeric_grad;
using sluice::testing::pick;
using sluice::testing::random_tensor;
using sluice::testing::relative_error;
using sluice::testing::sample_entries;

namespace {

std::vector<double> as_vec(std::span<const double> s) {
  return {s.begin(), s.end()};
}

void zero(Parameter& p) {
  for (double& v : p.mutable_value().mutable_values()) v = 0.0;
}

void copy_cell(const LstmCell& from, LstmCell& to) {
  to.input_weights.mutable_value() = from.input_weights.value();
  to.recurrent_weights.mutable_value() = from.recurrent_weights.value();
  to.bias.mutable_value() = from.bias.value();
}

std::vector<Var> constants(Tape& tape, const std::vector<Tensor>& xs) {
  std::vector<Var> out;
  for (const auto& x : xs) out.push_back(tape.constant(x));
  return out;
}

// Largest relative error over the given parameters, each checked on up to
// `limit` sampled entries.
double max_param_error(const std::vector<Parameter*>& params,
                       const std::function<double(bool)>& run,
                       std::size_t limit, Rng& rng) {
  for (auto* p : params) p->zero_grad();
  run(true);
  double worst = 0.0;
  for (auto* p : params) {
    auto idx = sample_entries(*p, limit, rng);
    auto analytic = pick(p->grad(), idx);
    p->zero_grad();
    auto numeric = numeric_grad(*p, [&] { return run(false); }, 1e-5, &idx);
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

}  // namespace

TEST_CASE("recurrent_step with zero weights gives a zero state") {
  Rng rng(1);
  LstmCell cell("c", 3, 4, rng);
  zero(cell.input_weights);
  zero(cell.recurrent_weights);
  Tape tape;
  auto s = recurrent_step(tape, cell, tape.constant(Tensor::vector({1, -2, 3})),
                          initial_state(tape, cell));
  for (double v : tape.values(s.h)) CHECK(v == 0.0);
  for (double v : tape.values(s.c)) CHECK(v == 0.0);
}

TEST_CASE("recurrent_step keeps h inside (-1, 1)") {
  Rng rng(2);
  LstmCell cell("c", 5, 6, rng);
  Tape tape;
  LstmState s = initial_state(tape, cell);
  for (int t = 0; t < 20; ++t) {
    s = recurrent_step(tape, cell,
                       tape.constant(random_tensor(Shape::vec(5), rng, -30, 30)), s);
    for (double v : tape.values(s.h)) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
  }
  CHECK_THROWS_AS(recurrent_step(tape, cell, tape.constant(Tensor::vector({1, 2})), s),
                  DimensionError);
}

TEST_CASE("gradient through three chained recurrent steps") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    LstmCell cell("c", 3, 4, rng);
    for (double& b : cell.bias.mutable_value().mutable_values()) b = rng.uniform(-1, 1);
    Parameter x("x", random_tensor(Shape::mat(3, 3), rng));
    Tensor w = random_tensor(Shape::vec(4), rng);
    auto run = [&](bool backward) {
      Tape tape;
      Var xs = tape.param(x);
      LstmState s = initial_state(tape, cell);
      for (std::size_t t = 0; t < 3; ++t) {
        s = recurrent_step(tape, cell, diff::row(xs, t), s);
      }
      Var loss = sum(mul(add(s.h, s.c), tape.constant(w)));
      if (backward) tape.backward(loss);
      return tape.scalar(loss);
    };
    std::vector<Parameter*> params{&cell.input_weights, &cell.recurrent_weights,
                                   &cell.bias, &x};
    CHECK(max_param_error(params, run, 1000, rng) < 1e-4);
  }
}

TEST_CASE("layer_forward shapes") {
  Rng rng(3);
  RecurrentLayer layer("l", 1, 3, 4, 2, rng);
  Tape tape;
  std::vector<Var> one = constants(tape, {Tensor::vector({1, 2, 3})});
  auto out = layer_forward(tape, layer, one);
  REQUIRE(out.size() == 1);
  CHECK(out[0].shape() == Shape::vec(8));
  std::vector<Var> none;
  CHECK_THROWS_AS(layer_forward(tape, layer, none), InputError);
  CHECK_THROWS_AS(RecurrentLayer("odd", 1, 3, 5, 2, rng), ConfigError);
}

TEST_CASE("subspace views are matched direction halves") {
  Rng rng(4);
  RecurrentLayer layer("l", 1, 3, 6, 2, rng);
  std::vector<Tensor> xs;
  for (int t = 0; t < 4; ++t) xs.push_back(random_tensor(Shape::vec(3), rng));
  Tape tape;
  auto in = constants(tape, xs);
  auto out = layer_forward(tape, layer, in);

  // Independent run of each direction.
  std::vector<std::vector<double>> fwd(4), bwd(4);
  LstmState s = initial_state(tape, layer.forward);
  for (int t = 0; t < 4; ++t) {
    s = recurrent_step(tape, layer.forward, in[t], s);
    fwd[t] = as_vec(tape.values(s.h));
  }
  s = initial_state(tape, layer.backward);
  for (int t = 3; t >= 0; --t) {
    s = recurrent_step(tape, layer.backward, in[t], s);
    bwd[t] = as_vec(tape.values(s.h));
  }
  for (int t = 0; t < 4; ++t) {
    std::vector<double> covered;
    for (std::size_t sub = 0; sub < 2; ++sub) {
      auto view = as_vec(tape.values(subspace_view(layer, out[t], sub)));
      REQUIRE(view.size() == 6);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(view[i] == fwd[t][sub * 3 + i]);
        CHECK(view[3 + i] == bwd[t][sub * 3 + i]);
      }
      covered.insert(covered.end(), view.begin(), view.end());
    }
    CHECK(covered == as_vec(tape.values(out[t])));
  }
  CHECK_THROWS_AS(subspace_view(layer, out[0], 2), DimensionError);
}

TEST_CASE("reversing the input swaps forward and backward halves") {
  Rng rng(5);
  RecurrentLayer layer("l", 1, 3, 4, 2, rng);
  copy_cell(layer.forward, layer.backward);
  std::vector<Tensor> xs;
  for (int t = 0; t < 5; ++t) xs.push_back(random_tensor(Shape::vec(3), rng));
  std::vector<Tensor> rev(xs.rbegin(), xs.rend());
  Tape tape;
  auto a_in = constants(tape, xs);
  auto b_in = constants(tape, rev);
  auto a = layer_forward(tape, layer, a_in);
  auto b = layer_forward(tape, layer, b_in);
  for (std::size_t t = 0; t < 5; ++t) {
    auto va = as_vec(tape.values(a[t]));
    auto vb = as_vec(tape.values(b[4 - t]));
    // Blocks of 2: [fwd_1, bwd_1, fwd_2, bwd_2].
    for (std::size_t blk = 0; blk < 4; blk += 2) {
      for (std::size_t i = 0; i < 2; ++i) {
        CHECK(va[blk * 2 + i] == doctest::Approx(vb[(blk + 1) * 2 + i]).epsilon(1e-14));
        CHECK(va[(blk + 1) * 2 + i] == doctest::Approx(vb[blk * 2 + i]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("embed_token") {
  Vocabulary vocab;
  for (const char* w : {"the", "cat"}) {
    vocab.add_word(w);
    for (const auto& c : utf8_chars(w)) vocab.add_char(c);
  }
  for (const char* c : {"d", "o", "g", "x"}) vocab.add_char(c);
  Rng rng(6);
  EmbeddingDims dims;
  EmbeddingTable table(vocab.word_count(), vocab.char_count(), dims, rng);
  Tape tape;
  auto embed = [&](const std::string& w) {
    return as_vec(tape.values(
        embed_token(tape, table, vocab.word_id(w), vocab.char_ids(w))));
  };
  auto cat = embed("cat");
  CHECK(cat.size() == 64 + 2 * 50);
  CHECK(cat == embed("cat"));

  auto dog = embed("dog");
  auto dox = embed("dox");
  CHECK(std::equal(dog.begin(), dog.begin() + 64, dox.begin()));
  CHECK(std::equal(dog.begin(), dog.begin() + 64,
                   table.word_matrix().value().values().begin()));
  CHECK_FALSE(std::equal(dog.begin() + 64, dog.end(), dox.begin() + 64));

  std::vector<std::uint32_t> empty;
  CHECK_THROWS_AS(embed_token(tape, table, 1, empty), InputError);
}

TEST_CASE("output_logits") {
  Rng rng(7);
  OutputHead head("h", 6, 5, 4, rng);
  Tape tape;
  Var h = tape.constant(random_tensor(Shape::vec(6), rng));
  Var logits = output_logits(tape, head, h);
  CHECK(logits.shape() == Shape::vec(4));

  // Parameters are read once per tape, so the zeroed head needs a new tape.
  for (auto* p : head.parameters()) zero(*p);
  Tape fresh;
  Var flat = output_logits(fresh, head, fresh.constant(tape.value(h)));
  for (double v : fresh.values(flat)) CHECK(v == 0.0);
  for (double p : diff::softmax(fresh.values(flat))) CHECK(p == doctest::Approx(0.25));

  CHECK_THROWS_AS(output_logits(tape, head, tape.constant(Tensor::vector({1, 2}))),
                  DimensionError);
  CHECK_THROWS_AS(OutputHead("one", 6, 5, 1, rng), ConfigError);
}

TEST_CASE("argmax is invariant to a constant logit shift") {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    Tensor z = random_tensor(Shape::vec(6), rng);
    std::vector<double> v(z.values().begin(), z.values().end());
    std::vector<double> shifted = v;
    const double c = rng.uniform(-100, 100);
    for (double& x : shifted) x += c;
    CHECK(std::max_element(v.begin(), v.end()) - v.begin() ==
          std::max_element(shifted.begin(), shifted.end()) - shifted.begin());
  }
}

TEST_CASE("end-to-end gradient of a two-token sentence") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    EmbeddingDims dims{5, 4, 3};
    EmbeddingTable table(4, 5, dims, rng);
    NetworkDims nd{2, 4, 2, 5};
    TaskNetwork net("t", 0, table.output_dim(), 8, 3, nd, rng);
    const std::vector<std::uint32_t> words{1, 3};
    const std::vector<std::vector<std::uint32_t>> chars{{1, 2}, {3, 4, 1}};
    const std::vector<std::size_t> gold{2, 0};
    auto run = [&](bool backward) {
      Tape tape;
      std::vector<Var> xs;
      for (std::size_t t = 0; t < 2; ++t) {
        xs.push_back(embed_token(tape, table, words[t], chars[t]));
      }
      for (auto& layer : net.layers) xs = layer_forward(tape, layer, xs);
      std::vector<Var> losses;
      for (std::size_t t = 0; t < 2; ++t) {
        losses.push_back(softmax_cross_entropy(output_logits(tape, net.head, xs[t]),
                                               gold[t]));
      }
      Var loss = sum(concat(losses, 0));
      if (backward) tape.backward(loss);
      return tape.scalar(loss);
    };
    std::vector<Parameter*> params = table.parameters();
    for (auto* p : net.parameters()) params.push_back(p);
    CHECK(max_param_error(params, run, 40, rng) < 1e-4);
  }
}
