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

#include "encoder/lstm.hpp"

#include <cmath>

#include "errors.hpp"

namespace sluice::encoder {

using diff::Shape;
using diff::Tensor;
using diff::Var;

Tensor glorot_uniform(std::size_t rows, std::size_t cols, diff::Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.uniform(-bound, bound);
  return Tensor::matrix(rows, cols, std::move(v));
}

LstmCell::LstmCell(const std::string& name, std::size_t input_dim_,
                   std::size_t hidden_, diff::Rng& rng)
    : input_dim(input_dim_),
      hidden(hidden_),
      input_weights(name + ".W", glorot_uniform(4 * hidden_, input_dim_, rng)),
      recurrent_weights(name + ".U", glorot_uniform(4 * hidden_, hidden_, rng)),
      bias(name + ".b", Tensor::zeros(Shape::vec(4 * hidden_))) {}

std::vector<diff::Parameter*> LstmCell::parameters() {
  return {&input_weights, &recurrent_weights, &bias};
}

LstmState initial_state(diff::Tape& tape, const LstmCell& cell) {
  const Tensor zero = Tensor::zeros(Shape::vec(cell.hidden));
  return {tape.constant(zero), tape.constant(zero)};
}

LstmState recurrent_step(diff::Tape& tape, LstmCell& cell, Var x,
                         const LstmState& state) {
  if (x.shape() != Shape::vec(cell.input_dim)) {
    throw DimensionError("recurrent_step: input " + x.shape().str() +
                         " does not match cell input [" +
                         std::to_string(cell.input_dim) + "]");
  }
  if (state.h.shape() != Shape::vec(cell.hidden) ||
      state.c.shape() != Shape::vec(cell.hidden)) {
    throw DimensionError("recurrent_step: state does not match hidden size " +
                         std::to_string(cell.hidden));
  }
  const std::size_t h = cell.hidden;
  Var z = diff::add(diff::add(diff::matmul(tape.param(cell.input_weights), x),
                              diff::matmul(tape.param(cell.recurrent_weights),
                                           state.h)),
                    tape.param(cell.bias));
  Var in_gate = diff::sigmoid(diff::slice(z, 0, h));
  Var forget_gate = diff::sigmoid(diff::slice(z, h, h));
  Var out_gate = diff::sigmoid(diff::slice(z, 2 * h, h));
  Var candidate = diff::tanh(diff::slice(z, 3 * h, h));
  Var c = diff::add(diff::mul(forget_gate, state.c),
                    diff::mul(in_gate, candidate));
  return {diff::mul(out_gate, diff::tanh(c)), c};
}

RecurrentLayer::RecurrentLayer(const std::string& name, std::size_t index_,
                               std::size_t input_dim, std::size_t hidden_,
                               std::size_t subspaces_, diff::Rng& rng)
    : index(index_),
      hidden(hidden_),
      subspaces(subspaces_),
      forward(name + ".fwd", input_dim, hidden_, rng),
      backward(name + ".bwd", input_dim, hidden_, rng) {
  if (subspaces == 0 || hidden % subspaces != 0) {
    throw ConfigError("hidden size " + std::to_string(hidden) +
                      " is not divisible into " + std::to_string(subspaces) +
                      " subspaces");
  }
}

std::vector<diff::Parameter*> RecurrentLayer::parameters() {
  auto out = forward.parameters();
  for (auto* p : backward.parameters()) out.push_back(p);
  return out;
}

std::vector<Var> layer_forward(diff::Tape& tape, RecurrentLayer& layer,
                               std::span<const Var> inputs) {
  if (inputs.empty()) throw InputError("layer_forward on an empty sequence");
  const std::size_t n = inputs.size();
  std::vector<Var> fwd(n), bwd(n);
  LstmState s = initial_state(tape, layer.forward);
  for (std::size_t t = 0; t < n; ++t) {
    s = recurrent_step(tape, layer.forward, inputs[t], s);
    fwd[t] = s.h;
  }
  s = initial_state(tape, layer.backward);
  for (std::size_t t = n; t-- > 0;) {
    s = recurrent_step(tape, layer.backward, inputs[t], s);
    bwd[t] = s.h;
  }
  const std::size_t part = layer.hidden / layer.subspaces;
  std::vector<Var> out(n);
  std::vector<Var> pieces(2 * layer.subspaces);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t sub = 0; sub < layer.subspaces; ++sub) {
      pieces[2 * sub] = diff::slice(fwd[t], sub * part, part);
      pieces[2 * sub + 1] = diff::slice(bwd[t], sub * part, part);
    }
    out[t] = diff::concat(pieces, 0);
  }
  return out;
}

Var subspace_view(const RecurrentLayer& layer, Var output, std::size_t s) {
  if (s >= layer.subspaces) {
    throw DimensionError("subspace " + std::to_string(s) + " of " +
                         std::to_string(layer.subspaces));
  }
  const std::size_t d = layer.subspace_dim();
  return diff::slice(output, s * d, d);
}

}  // namespace sluice::encoder
