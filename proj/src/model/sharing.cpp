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

#include "model/sharing.hpp"

#include "errors.hpp"

namespace sluice::model {

using diff::Shape;
using diff::Tensor;
using diff::Var;

AlphaUnit::AlphaUnit(std::size_t layer, std::size_t tasks, std::size_t subspaces)
    : layer_(layer),
      tasks_(tasks),
      subspaces_(subspaces),
      slots_("alpha" + std::to_string(layer), Tensor::zeros(Shape::vec(1))) {
  if (tasks == 0 || subspaces == 0) {
    throw ConfigError("alpha unit needs at least one task and one subspace");
  }
  rewire(learned_pattern(dim()));
}

double AlphaUnit::entry(std::size_t to, std::size_t from) const {
  return slots_.value()[entry_slot(to, from)];
}

bool AlphaUnit::entry_frozen(std::size_t to, std::size_t from) const {
  return slots_.is_frozen(entry_slot(to, from));
}

std::vector<double> AlphaUnit::matrix_values() const {
  std::vector<double> out(entry_slot_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = slots_.value()[entry_slot_[i]];
  }
  return out;
}

void AlphaUnit::rewire(const AlphaPattern& pattern) {
  const std::size_t n = dim();
  if (pattern.entry_slot.size() != n * n) {
    throw ConfigError("alpha pattern has " +
                      std::to_string(pattern.entry_slot.size()) +
                      " entries, unit needs " + std::to_string(n * n));
  }
  if (pattern.slot_values.size() != pattern.slot_frozen.size() ||
      pattern.slot_values.empty()) {
    throw ConfigError("alpha pattern slot values and frozen mask disagree");
  }
  for (std::uint32_t s : pattern.entry_slot) {
    if (s >= pattern.slot_values.size()) {
      throw ConfigError("alpha pattern references a missing slot");
    }
  }
  entry_slot_ = pattern.entry_slot;
  slots_ = diff::Parameter(slots_.name(), Tensor::vector(pattern.slot_values));
  slots_.set_frozen(pattern.slot_frozen);
}

Var AlphaUnit::matrix(diff::Tape& tape) {
  const std::size_t n = dim();
  return diff::gather(tape.param(slots_), entry_slot_, Shape::mat(n, n));
}

AlphaPattern AlphaUnit::learned_pattern(std::size_t n) {
  AlphaPattern p;
  p.entry_slot.resize(n * n);
  p.slot_values.resize(n * n);
  p.slot_frozen.assign(n * n, false);
  const double off = n > 1 ? 0.1 / static_cast<double>(n - 1) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      p.entry_slot[i * n + j] = static_cast<std::uint32_t>(i * n + j);
      p.slot_values[i * n + j] = i == j ? (n > 1 ? 0.9 : 1.0) : off;
    }
  }
  return p;
}

BetaMixer::BetaMixer(std::size_t task, std::size_t layers)
    : task_(task),
      weights_("beta" + std::to_string(task),
               Tensor::vector(default_weights(layers))) {}

void BetaMixer::assign(std::vector<double> values, bool frozen) {
  if (values.size() != weights_.size()) {
    throw ConfigError("beta needs " + std::to_string(weights_.size()) +
                      " weights, got " + std::to_string(values.size()));
  }
  weights_ = diff::Parameter(weights_.name(), Tensor::vector(std::move(values)));
  if (frozen) weights_.freeze_all();
}

std::vector<double> BetaMixer::default_weights(std::size_t layers) {
  if (layers == 0) throw ConfigError("beta mixer needs at least one layer");
  std::vector<double> w(layers, 0.1);
  w.back() = 1.0 - 0.1 * static_cast<double>(layers - 1);
  return w;
}

std::vector<double> BetaMixer::one_hot(std::size_t layers, std::size_t layer) {
  if (layer == 0 || layer > layers) {
    throw ConfigError("beta one-hot layer " + std::to_string(layer) +
                      " outside 1.." + std::to_string(layers));
  }
  std::vector<double> w(layers, 0.0);
  w[layer - 1] = 1.0;
  return w;
}

std::vector<Var> alpha_combine(Var matrix, std::span<const Var> inputs) {
  const Shape ms = matrix.shape();
  if (ms.rank != 2 || ms.rows != ms.cols || ms.cols != inputs.size()) {
    throw ConfigError("alpha_combine: matrix " + ms.str() + " cannot mix " +
                      std::to_string(inputs.size()) + " inputs");
  }
  for (const Var& x : inputs) {
    if (x.shape() != inputs[0].shape() || x.shape().rank != 1) {
      throw ConfigError("alpha_combine: inputs differ in shape (" +
                        inputs[0].shape().str() + " vs " + x.shape().str() + ")");
    }
  }
  Var mixed = diff::matmul(matrix, diff::stack(inputs));
  std::vector<Var> out(inputs.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = diff::row(mixed, i);
  return out;
}

std::vector<Var> alpha_combine(diff::Tape& tape, AlphaUnit& unit,
                               std::span<const Var> inputs) {
  if (inputs.size() != unit.dim()) {
    throw ConfigError("alpha_combine: unit expects " + std::to_string(unit.dim()) +
                      " subspace outputs, got " + std::to_string(inputs.size()));
  }
  return alpha_combine(unit.matrix(tape), inputs);
}

Var beta_mix(Var beta, std::span<const Var> layer_outputs) {
  const std::size_t k = layer_outputs.size();
  if (k == 0 || beta.shape() != Shape::vec(k)) {
    throw ConfigError("beta_mix: " + beta.shape().str() + " weights for " +
                      std::to_string(k) + " layer outputs");
  }
  const Shape s = layer_outputs[0].shape();
  for (const Var& h : layer_outputs) {
    if (h.shape() != s || s.rank != 1) {
      throw ConfigError("beta_mix: layer outputs differ in shape (" + s.str() +
                        " vs " + h.shape().str() + ")");
    }
  }
  Var mixed = diff::matmul(diff::reshape(beta, Shape::mat(1, k)),
                           diff::stack(layer_outputs));
  return diff::reshape(mixed, s);
}

Var beta_mix(diff::Tape& tape, BetaMixer& mixer,
             std::span<const Var> layer_outputs) {
  return beta_mix(tape.param(mixer.weights()), layer_outputs);
}

ExtraParams count_extra_params(std::size_t tasks, std::size_t layers,
                               std::size_t subspaces) {
  if (tasks == 0 || layers == 0 || subspaces == 0) {
    throw ConfigError("count_extra_params needs M, K, S >= 1");
  }
  const std::size_t n = tasks * subspaces;
  return {n * n * layers, layers * tasks};
}

}  // namespace sluice::model
