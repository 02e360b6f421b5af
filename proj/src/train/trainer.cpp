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

#include "train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "diff/tape.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "model/preset.hpp"

namespace sluice::train {

using model::SluiceModel;

const EncodedSplit& TrainingData::split(std::size_t task,
                                        const std::string& name) const {
  const auto& per_task = splits.at(task);
  auto it = per_task.find(name);
  if (it == per_task.end()) {
    throw InputError("task '" + corpora.at(task).task.name + "' has no split '" +
                     name + "'");
  }
  return it->second;
}

EncodedSplit encode_split(const encoder::Vocabulary& vocab,
                          const data::Split& split) {
  EncodedSplit out;
  out.sentences.reserve(split.size());
  for (const auto& s : split) {
    out.sentences.push_back(model::encode_sentence(vocab, s.tokens));
    out.tags.push_back(s.tags);
  }
  return out;
}

TrainingData prepare_data(std::vector<data::Corpus> corpora,
                          std::size_t main_task, std::size_t min_count) {
  if (corpora.empty()) throw InputError("no corpora to train on");
  if (main_task >= corpora.size()) throw ConfigError("main task out of range");
  TrainingData d;
  d.corpora = std::move(corpora);
  d.main_task = main_task;
  std::vector<const data::Corpus*> ptrs;
  for (const auto& c : d.corpora) {
    if (c.train.empty()) {
      throw InputError("task '" + c.task.name + "' has an empty train split");
    }
    ptrs.push_back(&c);
  }
  d.vocab = data::build_vocab(ptrs, min_count);
  for (const auto& c : d.corpora) {
    std::map<std::string, EncodedSplit> per_task;
    per_task["train"] = encode_split(d.vocab, c.train);
    if (!c.dev.empty()) per_task["dev"] = encode_split(d.vocab, c.dev);
    if (!c.test.empty()) per_task["test"] = encode_split(d.vocab, c.test);
    for (const auto& [name, split] : c.extra) per_task[name] = encode_split(d.vocab, split);
    d.splits.push_back(std::move(per_task));
  }
  return d;
}

TrainingData load_training_data(const TrainConfig& config) {
  config.validate();
  std::vector<data::Corpus> corpora;
  for (const TaskSource& t : config.tasks) {
    data::Corpus c;
    c.task.name = t.name;
    const std::string train = config.path_for("train", t.name);
    const std::string dev = config.path_for("dev", t.name);
    const std::string test = config.path_for("test", t.name);
    if (train.empty()) throw UsageError("no train path for task '" + t.name + "'");
    if (dev.empty()) throw UsageError("no dev path for task '" + t.name + "'");
    c.train = data::load_conll(train, t.column, c.task.labels);
    c.dev = data::load_conll(dev, t.column, c.task.labels);
    if (!test.empty()) c.test = data::load_conll(test, t.column, c.task.labels);
    for (const auto& [name, path] : config.extra_tests) {
      c.extra[name] = data::load_conll(path, t.column, c.task.labels);
    }
    if (c.task.labels.size() < 2) {
      throw InputError("task '" + t.name + "' has fewer than 2 labels in " + train);
    }
    corpora.push_back(std::move(c));
  }
  const std::size_t main = config.main_index();
  corpora[main].task.is_main = true;
  return prepare_data(std::move(corpora), main, config.min_count);
}

model::ModelConfig model_config(const TrainConfig& config,
                                const TrainingData& data) {
  model::ModelConfig m;
  for (const auto& c : data.corpora) {
    m.task_names.push_back(c.task.name);
    m.label_counts.push_back(c.task.labels.size());
    auto it = config.lambdas.find(c.task.name);
    m.lambdas.push_back(it == config.lambdas.end() ? 1.0 : it->second);
  }
  m.main_task = data.main_task;
  m.embedding = {config.word_dim, config.char_dim, config.char_hidden};
  m.network = {config.layers, config.hidden, config.subspaces, config.mlp_hidden};
  m.concat_head = config.ablation.mixing == model::Mixing::kConcat;
  m.gamma = config.gamma;
  return m;
}

std::unique_ptr<SluiceModel> build_model(const TrainConfig& config,
                                         const TrainingData& data) {
  diff::Rng rng = diff::Rng(config.seed).fork(1);
  auto m = std::make_unique<SluiceModel>(model_config(config, data),
                                         data.vocab.word_count(),
                                         data.vocab.char_count(), rng);
  model::apply_preset(*m, config.preset);
  model::apply_ablation(*m, config.ablation);
  return m;
}

double lr_schedule(std::size_t epoch, const TrainConfig& config) {
  return config.lr / (1.0 + config.lr_decay * static_cast<double>(epoch));
}

EarlyStop early_stop_check(const std::vector<double>& history,
                           std::size_t patience) {
  if (history.empty()) throw ContractError("early_stop_check on an empty history");
  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i] > history[best]) best = i;
  }
  return {history.size() - 1 - best >= patience, best + 1};
}

std::size_t argmax(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

double evaluate_accuracy(SluiceModel& model, const EncodedSplit& split,
                         std::size_t task) {
  if (split.size() == 0) throw InputError("evaluate_accuracy on an empty split");
  std::vector<bool> heads(model.tasks(), false);
  heads.at(task) = true;
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    diff::Tape tape;
    auto r = model::forward_all_tasks(tape, model, split.sentences[i], heads);
    for (std::size_t t = 0; t < split.tags[i].size(); ++t) {
      correct += argmax(tape.values(r.logits[task][t])) == split.tags[i][t];
      ++total;
    }
  }
  if (total == 0) throw InputError("evaluate_accuracy on a split without tokens");
  return static_cast<double>(correct) / static_cast<double>(total);
}

EpochStats train_epoch(SluiceModel& model, const TrainingData& data,
                       diff::Rng& rng, std::size_t batch_size, double lr) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t tasks = model.tasks();
  std::vector<std::size_t> sizes;
  for (std::size_t m = 0; m < tasks; ++m) sizes.push_back(data.split(m, "train").size());
  data::BatchIterator it(sizes, batch_size, diff::Rng(rng.next_u64()));

  EpochStats stats;
  stats.train_loss.assign(tasks, 0.0);
  stats.batches.assign(tasks, 0);
  std::size_t batch_no = 0;
  std::size_t penalty_terms = 0;
  std::vector<model::TaskExample> examples;
  while (auto batch = it.next()) {
    ++batch_no;
    const EncodedSplit& train = data.split(batch->task, "train");
    examples.clear();
    for (std::size_t i : batch->sentences) {
      examples.push_back({batch->task, &train.sentences[i], &train.tags[i]});
    }
    auto where = [&] {
      std::string s = "batch " + std::to_string(batch_no) + " (task " +
                      model.task_name(batch->task) + ", sentences";
      for (std::size_t i : batch->sentences) s += " " + std::to_string(i);
      return s + ")";
    };
    diff::Tape tape;
    model::LossTerms loss;
    try {
      loss = model::total_loss(tape, model, examples);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " in " + where());
    }
    const double value = tape.scalar(loss.total);
    if (!std::isfinite(value)) throw NumericError("non-finite loss in " + where());
    tape.backward(loss.total);
    for (std::size_t k = 1; k <= model.layers(); ++k) {
      stats.alpha_grad_norm =
          std::max(stats.alpha_grad_norm, model.alpha(k).slots().grad_norm());
    }
    model.sgd_step(lr);
    stats.train_loss[batch->task] += loss.task_loss[batch->task];
    ++stats.batches[batch->task];
    if (model.gamma() > 0.0) {
      stats.penalty += loss.penalty;
      ++penalty_terms;
    }
  }
  for (std::size_t m = 0; m < tasks; ++m) {
    stats.train_loss[m] = stats.batches[m] == 0
                              ? std::numeric_limits<double>::quiet_NaN()
                              : stats.train_loss[m] / static_cast<double>(stats.batches[m]);
  }
  if (penalty_terms > 0) stats.penalty /= static_cast<double>(penalty_terms);
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

std::vector<diff::Tensor> capture(SluiceModel& model) {
  std::vector<diff::Tensor> out;
  for (auto* p : model.parameters()) out.push_back(p->value());
  return out;
}

void restore(SluiceModel& model, const std::vector<diff::Tensor>& values) {
  auto params = model.parameters();
  if (params.size() != values.size()) {
    throw ContractError("snapshot does not match the model's parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i]->shape() == values[i].shape())) {
      throw ContractError("snapshot shape mismatch for " + params[i]->name());
    }
    params[i]->mutable_value() = values[i];
  }
}

namespace {

nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string metrics_json(const MetricsRecord& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tasks"] = r.tasks;
  j["main_task"] = r.tasks.empty() ? "" : r.tasks[r.main_task];
  j["preset"] = r.preset;
  j["ablation"] = {{"alpha", model::alpha_mode_name(r.ablation.alpha)},
                   {"subspaces", r.ablation.subspaces},
                   {"mixing", model::mixing_name(r.ablation.mixing)}};
  j["seed"] = r.seed;
  ordered_json epochs = ordered_json::array();
  for (const EpochRecord& e : r.epochs) {
    ordered_json per_task = ordered_json::object();
    for (std::size_t m = 0; m < r.tasks.size(); ++m) {
      per_task[r.tasks[m]] = {{"train_loss", number(e.train_loss[m])},
                              {"dev_accuracy", number(e.dev_accuracy[m])}};
    }
    ordered_json beta = ordered_json::object();
    for (std::size_t m = 0; m < r.tasks.size(); ++m) beta[r.tasks[m]] = e.beta[m];
    epochs.push_back({{"epoch", e.epoch},
                      {"lr", e.lr},
                      {"tasks", per_task},
                      {"penalty", number(e.penalty)},
                      {"orthogonality", number(e.orthogonality)},
                      {"alpha_grad_norm", number(e.alpha_grad_norm)},
                      {"alpha", e.alpha},
                      {"beta", beta}});
  }
  j["epochs"] = epochs;
  j["best_epoch"] = r.best_epoch;
  j["stopped_early"] = r.stopped_early;
  ordered_json final_acc = ordered_json::object();
  for (const auto& [task, splits] : r.final_accuracy) {
    ordered_json s = ordered_json::object();
    for (const auto& [name, acc] : splits) s[name] = acc;
    final_acc[task] = s;
  }
  j["final_accuracy"] = final_acc;
  return j.dump(2) + "\n";
}

std::string timing_json(const MetricsRecord& r) {
  nlohmann::ordered_json j;
  std::vector<double> seconds;
  for (const EpochRecord& e : r.epochs) seconds.push_back(e.seconds);
  j["epoch_seconds"] = seconds;
  return j.dump(2) + "\n";
}

TrainingResult run_training(
    const TrainConfig& config, const TrainingData& data,
    const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  TrainingResult result;
  result.model = build_model(config, data);
  SluiceModel& model = *result.model;
  MetricsRecord& rec = result.metrics;
  for (std::size_t m = 0; m < model.tasks(); ++m) rec.tasks.push_back(model.task_name(m));
  rec.main_task = data.main_task;
  rec.preset = std::string(model::preset_name(config.preset));
  rec.ablation = config.ablation;
  rec.seed = config.seed;

  diff::Rng rng = diff::Rng(config.seed).fork(2);
  std::vector<double> history;
  std::vector<diff::Tensor> best;
  double best_dev = -1.0;
  for (std::size_t e = 0; e < config.max_epochs; ++e) {
    EpochRecord er;
    er.epoch = e + 1;
    er.lr = lr_schedule(e, config);
    EpochStats stats = train_epoch(model, data, rng, config.batch_size, er.lr);
    er.train_loss = stats.train_loss;
    er.penalty = stats.penalty;
    er.alpha_grad_norm = stats.alpha_grad_norm;
    er.seconds = stats.seconds;
    for (std::size_t m = 0; m < model.tasks(); ++m) {
      er.dev_accuracy.push_back(evaluate_accuracy(model, data.split(m, "dev"), m));
    }
    er.orthogonality = model::orthogonality_value(model);
    for (std::size_t k = 1; k <= model.layers(); ++k) {
      er.alpha.push_back(model.alpha(k).matrix_values());
    }
    for (std::size_t m = 0; m < model.tasks(); ++m) {
      const auto w = model.beta(m).weights().value().values();
      er.beta.emplace_back(w.begin(), w.end());
    }
    const double dev = er.dev_accuracy[data.main_task];
    if (on_epoch) on_epoch(er);
    rec.epochs.push_back(std::move(er));
    history.push_back(dev);
    if (dev > best_dev) {
      best_dev = dev;
      best = capture(model);
    }
    const EarlyStop es = early_stop_check(history, config.patience);
    rec.best_epoch = es.best_epoch;
    if (es.stop) {
      rec.stopped_early = true;
      break;
    }
  }
  restore(model, best);
  for (std::size_t m = 0; m < model.tasks(); ++m) {
    auto& out = rec.final_accuracy[model.task_name(m)];
    for (const auto& [name, split] : data.splits[m]) {
      if (name == "train") continue;
      out[name] = evaluate_accuracy(model, split, m);
    }
  }
  return result;
}

}  // namespace sluice::train
