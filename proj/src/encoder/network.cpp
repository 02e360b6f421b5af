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

#include "encoder/network.hpp"

#include "errors.hpp"

namespace sluice::encoder {

using diff::Shape;
using diff::Tensor;
using diff::Var;

namespace {

Tensor uniform_matrix(std::size_t rows, std::size_t cols, double bound,
                      diff::Rng& rng) {
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.uniform(-bound, bound);
  return Tensor::matrix(rows, cols, std::move(v));
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t words, std::size_t chars,
                               const EmbeddingDims& dims, diff::Rng& rng)
    : dims_(dims),
      word_matrix_("embed.word", uniform_matrix(words, dims.word_dim, 0.1, rng)),
      char_matrix_("embed.char", uniform_matrix(chars, dims.char_dim, 0.1, rng)),
      char_forward_("embed.char_fwd", dims.char_dim, dims.char_hidden, rng),
      char_backward_("embed.char_bwd", dims.char_dim, dims.char_hidden, rng) {
  if (words == 0 || chars == 0) {
    throw ConfigError("embedding tables need at least the unknown row");
  }
}

std::vector<diff::Parameter*> EmbeddingTable::parameters() {
  std::vector<diff::Parameter*> out{&word_matrix_, &char_matrix_};
  for (auto* p : char_forward_.parameters()) out.push_back(p);
  for (auto* p : char_backward_.parameters()) out.push_back(p);
  return out;
}

Var embed_token(diff::Tape& tape, EmbeddingTable& table, std::uint32_t word_id,
                std::span<const std::uint32_t> char_ids) {
  if (char_ids.empty()) throw InputError("embed_token: empty character sequence");
  const std::size_t words = table.word_matrix().shape().rows;
  const std::size_t chars = table.char_matrix().shape().rows;
  Var word_rows = tape.param(table.word_matrix());
  Var char_rows = tape.param(table.char_matrix());
  Var word = diff::row(word_rows, word_id < words ? word_id : 0);

  std::vector<Var> xs;
  xs.reserve(char_ids.size());
  for (std::uint32_t c : char_ids) xs.push_back(diff::row(char_rows, c < chars ? c : 0));
  LstmState f = initial_state(tape, table.char_forward());
  for (const Var& x : xs) f = recurrent_step(tape, table.char_forward(), x, f);
  LstmState b = initial_state(tape, table.char_backward());
  for (std::size_t t = xs.size(); t-- > 0;) {
    b = recurrent_step(tape, table.char_backward(), xs[t], b);
  }
  const Var parts[] = {word, f.h, b.h};
  return diff::concat(parts, 0);
}

OutputHead::OutputHead(const std::string& name, std::size_t input_dim_,
                       std::size_t mlp_hidden, std::size_t labels_,
                       diff::Rng& rng)
    : input_dim(input_dim_),
      labels(labels_),
      hidden_weights(name + ".W1", glorot_uniform(mlp_hidden, input_dim_, rng)),
      hidden_bias(name + ".b1", Tensor::zeros(Shape::vec(mlp_hidden))),
      out_weights(name + ".W2", glorot_uniform(labels_, mlp_hidden, rng)),
      out_bias(name + ".b2", Tensor::zeros(Shape::vec(labels_))) {
  if (labels < 2) {
    throw ConfigError(name + ": a task needs at least 2 labels, got " +
                      std::to_string(labels));
  }
}

std::vector<diff::Parameter*> OutputHead::parameters() {
  return {&hidden_weights, &hidden_bias, &out_weights, &out_bias};
}

Var output_logits(diff::Tape& tape, OutputHead& head, Var h) {
  if (h.shape() != Shape::vec(head.input_dim)) {
    throw DimensionError("output_logits: input " + h.shape().str() +
                         " does not match head input [" +
                         std::to_string(head.input_dim) + "]");
  }
  Var z = diff::tanh(diff::add(diff::matmul(tape.param(head.hidden_weights), h),
                               tape.param(head.hidden_bias)));
  return diff::add(diff::matmul(tape.param(head.out_weights), z),
                   tape.param(head.out_bias));
}

TaskNetwork::TaskNetwork(const std::string& name, std::size_t task_,
                         std::size_t input_dim, std::size_t head_input_dim,
                         std::size_t labels, const NetworkDims& dims,
                         diff::Rng& rng)
    : task(task_),
      head(name + ".head", head_input_dim, dims.mlp_hidden, labels, rng) {
  if (dims.layers == 0) throw ConfigError("a task network needs at least one layer");
  layers.reserve(dims.layers);
  for (std::size_t k = 1; k <= dims.layers; ++k) {
    layers.emplace_back(name + ".layer" + std::to_string(k), k,
                        k == 1 ? input_dim : 2 * dims.hidden, dims.hidden,
                        dims.subspaces, rng);
  }
}

std::vector<diff::Parameter*> TaskNetwork::parameters() {
  std::vector<diff::Parameter*> out;
  for (auto& layer : layers) {
    for (auto* p : layer.parameters()) out.push_back(p);
  }
  for (auto* p : head.parameters()) out.push_back(p);
  return out;
}

}  // namespace sluice::encoder
