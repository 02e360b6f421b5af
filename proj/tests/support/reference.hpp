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

// Plain-double reference implementations used as test oracles. They read
// parameter values directly and never touch the tape.

#include <cmath>
#include <cstdint>
#include <vector>

#include "encoder/lstm.hpp"
#include "encoder/network.hpp"
#include "model/model.hpp"

namespace sluice::testing {

using Vec = std::vector<double>;

inline double ref_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec ref_matvec(const diff::Tensor& m, const Vec& x) {
  Vec out(m.shape().rows, 0.0);
  for (std::size_t r = 0; r < m.shape().rows; ++r) {
    for (std::size_t c = 0; c < m.shape().cols; ++c) out[r] += m.at(r, c) * x[c];
  }
  return out;
}

struct RefState {
  Vec h, c;
};

inline RefState ref_step(const encoder::LstmCell& cell, const Vec& x,
                         const RefState& s) {
  const std::size_t h = cell.hidden;
  Vec z = ref_matvec(cell.input_weights.value(), x);
  Vec u = ref_matvec(cell.recurrent_weights.value(), s.h);
  RefState out{Vec(h), Vec(h)};
  for (std::size_t i = 0; i < h; ++i) {
    auto gate = [&](std::size_t g) {
      return z[g * h + i] + u[g * h + i] + cell.bias.value()[g * h + i];
    };
    const double in = ref_sigmoid(gate(0));
    const double forget = ref_sigmoid(gate(1));
    const double o = ref_sigmoid(gate(2));
    const double cand = std::tanh(gate(3));
    out.c[i] = forget * s.c[i] + in * cand;
    out.h[i] = o * std::tanh(out.c[i]);
  }
  return out;
}

struct RefBi {
  std::vector<Vec> fwd, bwd;
};

inline RefBi ref_bilstm(const encoder::LstmCell& fwd,
                        const encoder::LstmCell& bwd,
                        const std::vector<Vec>& xs) {
  const std::size_t n = xs.size();
  RefBi out{std::vector<Vec>(n), std::vector<Vec>(n)};
  RefState s{Vec(fwd.hidden, 0.0), Vec(fwd.hidden, 0.0)};
  for (std::size_t t = 0; t < n; ++t) out.fwd[t] = (s = ref_step(fwd, xs[t], s)).h;
  s = {Vec(bwd.hidden, 0.0), Vec(bwd.hidden, 0.0)};
  for (std::size_t t = n; t-- > 0;) out.bwd[t] = (s = ref_step(bwd, xs[t], s)).h;
  return out;
}

// Layer output layout: for each subspace s, [forward part s, backward part s].
inline Vec ref_layout(const Vec& f, const Vec& b, std::size_t subspaces) {
  const std::size_t part = f.size() / subspaces;
  Vec out;
  for (std::size_t s = 0; s < subspaces; ++s) {
    out.insert(out.end(), f.begin() + s * part, f.begin() + (s + 1) * part);
    out.insert(out.end(), b.begin() + s * part, b.begin() + (s + 1) * part);
  }
  return out;
}

inline Vec ref_embed(encoder::EmbeddingTable& table, std::uint32_t word,
                     const std::vector<std::uint32_t>& chars) {
  const auto& wm = table.word_matrix().value();
  const auto& cm = table.char_matrix().value();
  Vec out;
  for (std::size_t c = 0; c < wm.shape().cols; ++c) out.push_back(wm.at(word, c));
  std::vector<Vec> xs;
  for (auto id : chars) {
    Vec x;
    for (std::size_t c = 0; c < cm.shape().cols; ++c) x.push_back(cm.at(id, c));
    xs.push_back(x);
  }
  const auto both = ref_bilstm(table.char_forward(), table.char_backward(), xs);
  out.insert(out.end(), both.fwd.back().begin(), both.fwd.back().end());
  out.insert(out.end(), both.bwd.front().begin(), both.bwd.front().end());
  return out;
}

inline Vec ref_head(const encoder::OutputHead& head, const Vec& x) {
  Vec z = ref_matvec(head.hidden_weights.value(), x);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = std::tanh(z[i] + head.hidden_bias.value()[i]);
  }
  Vec out = ref_matvec(head.out_weights.value(), z);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += head.out_bias.value()[i];
  return out;
}

// Cross-stitch network: whole-layer mixing h'_a = sum_b alpha[a][b] * h_b
// after every layer, and each head reads its task's outer layer only.
// `alpha[k][a][b]` holds the task-level weights of layer k (0-based).
inline std::vector<std::vector<Vec>> ref_cross_stitch(
    model::SluiceModel& m, const model::EncodedSentence& s,
    const std::vector<std::vector<std::vector<double>>>& alpha) {
  const std::size_t tasks = m.tasks();
  std::vector<Vec> emb;
  for (std::size_t t = 0; t < s.size(); ++t) {
    emb.push_back(ref_embed(m.embedding(), s.words[t], s.chars[t]));
  }
  std::vector<std::vector<Vec>> inputs(tasks, emb);
  for (std::size_t k = 0; k < m.layers(); ++k) {
    std::vector<std::vector<Vec>> h(tasks);
    for (std::size_t a = 0; a < tasks; ++a) {
      const auto& layer = m.network(a).layers[k];
      const auto both = ref_bilstm(layer.forward, layer.backward, inputs[a]);
      for (std::size_t t = 0; t < s.size(); ++t) {
        h[a].push_back(ref_layout(both.fwd[t], both.bwd[t], m.subspaces()));
      }
    }
    for (std::size_t a = 0; a < tasks; ++a) {
      for (std::size_t t = 0; t < s.size(); ++t) {
        Vec mixed(h[a][t].size(), 0.0);
        for (std::size_t b = 0; b < tasks; ++b) {
          for (std::size_t i = 0; i < mixed.size(); ++i) {
            mixed[i] += alpha[k][a][b] * h[b][t][i];
          }
        }
        inputs[a][t] = mixed;
      }
    }
  }
  std::vector<std::vector<Vec>> logits(tasks);
  for (std::size_t a = 0; a < tasks; ++a) {
    for (std::size_t t = 0; t < s.size(); ++t) {
      logits[a].push_back(ref_head(m.network(a).head, inputs[a][t]));
    }
  }
  return logits;
}

}  // namespace sluice::testing
