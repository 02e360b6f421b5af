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
#include "diff/rng.hpp"
#include "diff/tape.hpp"
#include "encoder/lstm.hpp"

namespace sluice::encoder {

struct EmbeddingDims {
  std::size_t word_dim = 64;
  std::size_t char_dim = 100;
  std::size_t char_hidden = 50;  // per direction
};

// Word rows plus a character-level bidirectional LSTM. Shared by all tasks.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t words, std::size_t chars, const EmbeddingDims& dims,
                 diff::Rng& rng);

  const EmbeddingDims& dims() const { return dims_; }
  std::size_t output_dim() const {
    return dims_.word_dim + 2 * dims_.char_hidden;
  }

  diff::Parameter& word_matrix() { return word_matrix_; }
  diff::Parameter& char_matrix() { return char_matrix_; }
  LstmCell& char_forward() { return char_forward_; }
  LstmCell& char_backward() { return char_backward_; }
  std::vector<diff::Parameter*> parameters();

 private:
  EmbeddingDims dims_;
  diff::Parameter word_matrix_;  // [|V| x word_dim]
  diff::Parameter char_matrix_;  // [|C| x char_dim]
  LstmCell char_forward_;
  LstmCell char_backward_;
};

// [word row ; final forward char state ; final backward char state]
// Ids out of range are treated as unknown (id 0).
diff::Var embed_token(diff::Tape& tape, EmbeddingTable& table,
                      std::uint32_t word_id,
                      std::span<const std::uint32_t> char_ids);

// tanh MLP followed by a linear map to one logit per label.
struct OutputHead {
  OutputHead(const std::string& name, std::size_t input_dim,
             std::size_t mlp_hidden, std::size_t labels, diff::Rng& rng);

  std::size_t input_dim;
  std::size_t labels;
  diff::Parameter hidden_weights;  // [mlp x input_dim]
  diff::Parameter hidden_bias;     // [mlp]
  diff::Parameter out_weights;     // [labels x mlp]
  diff::Parameter out_bias;        // [labels]

  std::vector<diff::Parameter*> parameters();
};

diff::Var output_logits(diff::Tape& tape, OutputHead& head, diff::Var h);

struct NetworkDims {
  std::size_t layers = 3;
  std::size_t hidden = 100;  // per direction
  std::size_t subspaces = 2;
  std::size_t mlp_hidden = 100;
};

// One task's stack of bidirectional layers and its output head. Layer k reads
// 2*hidden inputs except layer 1, which reads the token embedding.
struct TaskNetwork {
  TaskNetwork(const std::string& name, std::size_t task, std::size_t input_dim,
              std::size_t head_input_dim, std::size_t labels,
              const NetworkDims& dims, diff::Rng& rng);

  std::size_t task;
  std::vector<RecurrentLayer> layers;
  OutputHead head;

  std::vector<diff::Parameter*> parameters();
};

}  // namespace sluice::encoder
