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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diff/parameter.hpp"
#include "diff/tape.hpp"

namespace sluice::model {

// Storage layout of an alpha matrix: every (to, from) entry reads one slot.
// Entries that share a slot are tied; frozen slots never change.
struct AlphaPattern {
  std::vector<std::uint32_t> entry_slot;  // n*n, row-major (to, from)
  std::vector<double> slot_values;
  std::vector<bool> slot_frozen;
};

// Mixing matrix over all tasks' subspaces at one layer boundary.
// Rows and columns are ordered task-major: index(task, s) = task * S + s,
// i.e. (task 1 subspace 1, task 1 subspace 2, task 2 subspace 1, ...).
class AlphaUnit {
 public:
  AlphaUnit(std::size_t layer, std::size_t tasks, std::size_t subspaces);

  std::size_t layer() const { return layer_; }
  std::size_t tasks() const { return tasks_; }
  std::size_t subspaces() const { return subspaces_; }
  std::size_t dim() const { return tasks_ * subspaces_; }
  std::size_t index(std::size_t task, std::size_t s) const {
    return task * subspaces_ + s;
  }

  double entry(std::size_t to, std::size_t from) const;
  bool entry_frozen(std::size_t to, std::size_t from) const;
  std::uint32_t entry_slot(std::size_t to, std::size_t from) const {
    return entry_slot_[to * dim() + from];
  }
  std::size_t entry_count() const { return entry_slot_.size(); }
  std::vector<double> matrix_values() const;

  void rewire(const AlphaPattern& pattern);

  diff::Parameter& slots() { return slots_; }
  const diff::Parameter& slots() const { return slots_; }

  // [dim x dim] view gathered from the slots.
  diff::Var matrix(diff::Tape& tape);

  // Unit default: free entries, 0.9 on the diagonal and the remaining 0.1 of
  // each row spread over its off-diagonal entries.
  static AlphaPattern learned_pattern(std::size_t n);

 private:
  std::size_t layer_;
  std::size_t tasks_;
  std::size_t subspaces_;
  std::vector<std::uint32_t> entry_slot_;
  diff::Parameter slots_;
};

// Per-task weights over the K layer outputs feeding the head.
class BetaMixer {
 public:
  BetaMixer(std::size_t task, std::size_t layers);

  std::size_t task() const { return task_; }
  std::size_t layers() const { return weights_.size(); }
  double weight(std::size_t k) const { return weights_.value()[k]; }

  // Sets all K weights; `frozen` is all-or-nothing.
  void assign(std::vector<double> values, bool frozen);

  diff::Parameter& weights() { return weights_; }
  const diff::Parameter& weights() const { return weights_; }

  // 0.1 on every layer except the last, which takes the rest.
  static std::vector<double> default_weights(std::size_t layers);
  static std::vector<double> one_hot(std::size_t layers, std::size_t layer);

 private:
  std::size_t task_;
  diff::Parameter weights_;
};

// output_i = sum_j A[i][j] * input_j
std::vector<diff::Var> alpha_combine(diff::Var matrix,
                                     std::span<const diff::Var> inputs);
std::vector<diff::Var> alpha_combine(diff::Tape& tape, AlphaUnit& unit,
                                     std::span<const diff::Var> inputs);

// sum_k beta_k * h_k
diff::Var beta_mix(diff::Var beta, std::span<const diff::Var> layer_outputs);
diff::Var beta_mix(diff::Tape& tape, BetaMixer& mixer,
                   std::span<const diff::Var> layer_outputs);

struct ExtraParams {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  bool operator==(const ExtraParams&) const = default;
};

// ((S*M)^2 * K, K*M)
ExtraParams count_extra_params(std::size_t tasks, std::size_t layers,
                               std::size_t subspaces = 2);

}  // namespace sluice::model
