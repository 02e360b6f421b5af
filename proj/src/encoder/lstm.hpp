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
#include <span>
#include <string>
#include <vector>

#include "diff/parameter.hpp"
#include "diff/rng.hpp"
#include "diff/tape.hpp"

namespace sluice::encoder {

// Glorot-uniform matrix: entries in +-sqrt(6 / (rows + cols)).
diff::Tensor glorot_uniform(std::size_t rows, std::size_t cols, diff::Rng& rng);

// One direction of an LSTM. Gate blocks of the stacked weights are ordered
// input, forget, output, candidate; each block has `hidden` rows.
struct LstmCell {
  LstmCell(const std::string& name, std::size_t input_dim, std::size_t hidden,
           diff::Rng& rng);

  std::size_t input_dim;
  std::size_t hidden;
  diff::Parameter input_weights;      // [4H x input_dim]
  diff::Parameter recurrent_weights;  // [4H x H]
  diff::Parameter bias;               // [4H]

  std::vector<diff::Parameter*> parameters();
};

struct LstmState {
  diff::Var h;
  diff::Var c;
};

LstmState initial_state(diff::Tape& tape, const LstmCell& cell);

// c' = f*c + i*g ; h' = o*tanh(c')
LstmState recurrent_step(diff::Tape& tape, LstmCell& cell, diff::Var x,
                         const LstmState& state);

// A bidirectional layer whose hidden units are split into `subspaces` equal
// groups per direction. Output vectors are laid out subspace-major:
//   [fwd_1, bwd_1, fwd_2, bwd_2, ...]
// so subspace s of the layer is the contiguous block
// [s * 2H/S, (s + 1) * 2H/S).
struct RecurrentLayer {
  RecurrentLayer(const std::string& name, std::size_t index,
                 std::size_t input_dim, std::size_t hidden,
                 std::size_t subspaces, diff::Rng& rng);

  std::size_t index;  // 1-based depth
  std::size_t hidden;
  std::size_t subspaces;
  LstmCell forward;
  LstmCell backward;

  std::size_t output_dim() const { return 2 * hidden; }
  std::size_t subspace_dim() const { return 2 * hidden / subspaces; }
  std::vector<diff::Parameter*> parameters();
};

std::vector<diff::Var> layer_forward(diff::Tape& tape, RecurrentLayer& layer,
                                     std::span<const diff::Var> inputs);

// View of subspace `s` of a layer output.
diff::Var subspace_view(const RecurrentLayer& layer, diff::Var output,
                        std::size_t s);

}  // namespace sluice::encoder
