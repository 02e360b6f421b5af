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

#include "model/model.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace sluice::model {

using diff::Shape;
using diff::Tensor;
using diff::Var;

EncodedSentence encode_sentence(const encoder::Vocabulary& vocab,
                                std::span<const std::string> tokens) {
  EncodedSentence out;
  out.words.reserve(tokens.size());
  out.chars.reserve(tokens.size());
  for (const std::string& token : tokens) {
    out.words.push_back(vocab.word_id(token));
    auto chars = vocab.char_ids(token);
    if (chars.empty()) chars.push_back(encoder::Vocabulary::kUnk);
    out.chars.push_back(std::move(chars));
  }
  return out;
}

namespace {

std::size_t head_input_dim(const ModelConfig& c) {
  const std::size_t layer_dim = 2 * c.network.hidden;
  return c.concat_head ? c.network.layers * layer_dim : layer_dim;
}

const ModelConfig& validated(const ModelConfig& c) {
  if (c.label_counts.empty()) throw ConfigError("a model needs at least one task");
  if (c.task_names.size() != c.label_counts.size()) {
    throw ConfigError("task names and label counts disagree in length");
  }
  if (c.main_task >= c.label_counts.size()) {
    throw ConfigError("main task index out of range");
  }
  if (!c.lambdas.empty() && c.lambdas.size() != c.label_counts.size()) {
    throw ConfigError("need one lambda per task");
  }
  if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) {
    throw ConfigError("gamma must be a finite non-negative number");
  }
  return c;
}

}  // namespace

SluiceModel::SluiceModel(ModelConfig config, std::size_t vocab_words,
                         std::size_t vocab_chars, diff::Rng& rng)
    : config_(validated(config)),
      embedding_(vocab_words, vocab_chars, config_.embedding, rng),
      gamma_(config_.gamma) {
  const std::size_t m_count = config_.label_counts.size();
  networks_.reserve(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    networks_.emplace_back("task" + std::to_string(m), m,
                           embedding_.output_dim(), head_input_dim(config_),
                           config_.label_counts[m], config_.network, rng);
  }
  for (std::size_t k = 1; k <= config_.network.layers; ++k) {
    alphas_.emplace_back(k, m_count, config_.network.subspaces);
  }
  for (std::size_t m = 0; m < m_count; ++m) {
    betas_.emplace_back(m, config_.network.layers);
  }
  lambdas_ = config_.lambdas.empty() ? std::vector<double>(m_count, 1.0)
                                     : config_.lambdas;
}

void SluiceModel::set_gamma(double g) {
  if (!(g >= 0.0) || !std::isfinite(g)) {
    throw ConfigError("gamma must be a finite non-negative number");
  }
  gamma_ = g;
}

void SluiceModel::set_lambda(std::size_t m, double value) {
  if (!std::isfinite(value)) throw ConfigError("lambda must be finite");
  lambdas_.at(m) = value;
}

std::vector<diff::Parameter*> SluiceModel::parameters() {
  std::vector<diff::Parameter*> out = embedding_.parameters();
  for (auto& net : networks_) {
    for (auto* p : net.parameters()) out.push_back(p);
  }
  for (auto* p : sharing_parameters()) out.push_back(p);
  return out;
}

std::vector<diff::Parameter*> SluiceModel::sharing_parameters() {
  std::vector<diff::Parameter*> out;
  for (auto& a : alphas_) out.push_back(&a.slots());
  for (auto& b : betas_) out.push_back(&b.weights());
  return out;
}

ExtraParams SluiceModel::extra_params() const {
  ExtraParams e;
  for (const auto& a : alphas_) e.alpha += a.entry_count();
  for (const auto& b : betas_) e.beta += b.layers();
  return e;
}

void SluiceModel::mirror_task_initialization() {
  auto source = networks_[0].parameters();
  for (std::size_t m = 1; m < networks_.size(); ++m) {
    auto target = networks_[m].parameters();
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (source[i]->shape() == target[i]->shape()) {
        target[i]->mutable_value() = source[i]->value();
      }
    }
  }
}

void SluiceModel::sgd_step(double lr) {
  const auto params = parameters();
  diff::sgd_step(params, lr);
  trained_ = true;
}

ForwardResult forward_all_tasks(diff::Tape& tape, SluiceModel& model,
                                const EncodedSentence& sentence,
                                const std::vector<bool>& heads) {
  const std::size_t n = sentence.size();
  if (n == 0) throw InputError("forward_all_tasks on an empty sentence");
  if (sentence.chars.size() != n) {
    throw InputError("sentence has mismatched word and character sequences");
  }
  const std::size_t tasks = model.tasks();
  const std::size_t layers = model.layers();
  const std::size_t subs = model.subspaces();
  if (!heads.empty() && heads.size() != tasks) {
    throw ConfigError("head selection needs one flag per task");
  }

  std::vector<Var> embedded(n);
  for (std::size_t t = 0; t < n; ++t) {
    embedded[t] = encoder::embed_token(tape, model.embedding(),
                                       sentence.words[t], sentence.chars[t]);
  }

  ForwardResult r;
  r.raw.assign(tasks, std::vector<std::vector<Var>>(layers));
  r.mixed.assign(tasks, std::vector<std::vector<Var>>(layers));
  std::vector<Var> parts(tasks * subs);
  std::vector<Var> own(subs);
  for (std::size_t k = 1; k <= layers; ++k) {
    for (std::size_t m = 0; m < tasks; ++m) {
      const auto& input = k == 1 ? embedded : r.mixed[m][k - 2];
      r.raw[m][k - 1] =
          encoder::layer_forward(tape, model.network(m).layers[k - 1], input);
      r.mixed[m][k - 1].resize(n);
    }
    AlphaUnit& unit = model.alpha(k);
    Var a = unit.matrix(tape);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t m = 0; m < tasks; ++m) {
        const auto& layer = model.network(m).layers[k - 1];
        for (std::size_t s = 0; s < subs; ++s) {
          parts[unit.index(m, s)] =
              encoder::subspace_view(layer, r.raw[m][k - 1][t], s);
        }
      }
      auto outs = alpha_combine(a, parts);
      for (std::size_t m = 0; m < tasks; ++m) {
        for (std::size_t s = 0; s < subs; ++s) own[s] = outs[unit.index(m, s)];
        r.mixed[m][k - 1][t] = subs == 1 ? own[0] : diff::concat(own, 0);
      }
    }
  }

  r.logits.resize(tasks);
  std::vector<Var> per_layer(layers);
  for (std::size_t m = 0; m < tasks; ++m) {
    if (!heads.empty() && !heads[m]) continue;
    auto& head = model.network(m).head;
    Var beta = tape.param(model.beta(m).weights());
    r.logits[m].resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < layers; ++k) per_layer[k] = r.mixed[m][k][t];
      Var h = model.config().concat_head ? diff::concat(per_layer, 0)
                                         : beta_mix(beta, per_layer);
      r.logits[m][t] = encoder::output_logits(tape, head, h);
    }
  }
  return r;
}

namespace {

// Input-weight rows owned by subspace s, gate-major.
std::vector<std::uint32_t> subspace_rows(std::size_t hidden, std::size_t subs,
                                         std::size_t s) {
  const std::size_t part = hidden / subs;
  std::vector<std::uint32_t> rows;
  rows.reserve(4 * part);
  for (std::size_t g = 0; g < 4; ++g) {
    for (std::size_t u = 0; u < part; ++u) {
      rows.push_back(static_cast<std::uint32_t>(g * hidden + s * part + u));
    }
  }
  return rows;
}

}  // namespace

Var subspace_overlap(Var a, Var b) {
  return diff::frobenius_sq(diff::matmul(diff::transpose(a), b));
}

Var orthogonality_penalty(diff::Tape& tape, SluiceModel& model) {
  const std::size_t subs = model.subspaces();
  std::vector<Var> terms;
  std::vector<Var> blocks(subs);
  for (std::size_t m = 0; m < model.tasks(); ++m) {
    for (auto& layer : model.network(m).layers) {
      for (encoder::LstmCell* cell : {&layer.forward, &layer.backward}) {
        Var w = tape.param(cell->input_weights);
        for (std::size_t s = 0; s < subs; ++s) {
          blocks[s] = diff::gather_rows(w, subspace_rows(cell->hidden, subs, s));
        }
        for (std::size_t s = 0; s < subs; ++s) {
          for (std::size_t u = s + 1; u < subs; ++u) {
            // Rows here are the columns of G, so G_s^T G_u = R_s R_u^T.
            terms.push_back(diff::cross_frobenius_sq(blocks[s], blocks[u]));
          }
        }
      }
    }
  }
  if (terms.empty()) return tape.constant(Tensor::zeros(Shape::scalar()));
  return terms.size() == 1 ? terms[0] : diff::sum(diff::concat(terms, 0));
}

double orthogonality_value(const SluiceModel& model) {
  auto& mutable_model = const_cast<SluiceModel&>(model);
  diff::Tape tape;
  return tape.scalar(orthogonality_penalty(tape, mutable_model));
}

LossTerms total_loss(diff::Tape& tape, SluiceModel& model,
                     std::span<const TaskExample> batch) {
  if (batch.empty()) throw InputError("total_loss on an empty batch");
  const std::size_t tasks = model.tasks();
  for (const TaskExample& ex : batch) {
    if (ex.task >= tasks) throw ConfigError("batch names an unknown task");
    if (ex.sentence == nullptr || ex.tags == nullptr ||
        ex.tags->size() != ex.sentence->size()) {
      throw InputError("batch example has mismatched tokens and tags");
    }
  }

  // Examples over the same sentence share one forward pass.
  std::vector<const EncodedSentence*> order;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::size_t g = 0;
    while (g < order.size() && order[g] != batch[i].sentence) ++g;
    if (g == order.size()) {
      order.push_back(batch[i].sentence);
      groups.emplace_back();
    }
    groups[g].push_back(i);
  }

  std::vector<std::vector<Var>> losses(tasks);
  for (std::size_t g = 0; g < order.size(); ++g) {
    std::vector<bool> heads(tasks, false);
    for (std::size_t i : groups[g]) heads[batch[i].task] = true;
    ForwardResult fr = forward_all_tasks(tape, model, *order[g], heads);
    for (std::size_t i : groups[g]) {
      const TaskExample& ex = batch[i];
      for (std::size_t t = 0; t < ex.tags->size(); ++t) {
        losses[ex.task].push_back(
            diff::softmax_cross_entropy(fr.logits[ex.task][t], (*ex.tags)[t]));
      }
    }
  }

  LossTerms out;
  out.task_loss.assign(tasks, std::numeric_limits<double>::quiet_NaN());
  out.task_tokens.assign(tasks, 0);
  std::vector<Var> terms;
  for (std::size_t m = 0; m < tasks; ++m) {
    if (losses[m].empty()) continue;
    const double count = static_cast<double>(losses[m].size());
    Var mean = diff::scale(diff::sum(diff::concat(losses[m], 0)), 1.0 / count);
    out.task_loss[m] = tape.scalar(mean);
    out.task_tokens[m] = losses[m].size();
    terms.push_back(diff::scale(mean, model.lambda(m)));
  }
  if (model.gamma() > 0.0) {
    Var penalty = orthogonality_penalty(tape, model);
    out.penalty = tape.scalar(penalty);
    terms.push_back(diff::scale(penalty, model.gamma()));
  }
  out.total = terms.size() == 1 ? terms[0] : diff::sum(diff::concat(terms, 0));
  return out;
}

}  // namespace sluice::model
