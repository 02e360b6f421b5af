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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "data/corpus.hpp"
#include "diff/rng.hpp"
#include "diff/tensor.hpp"
#include "encoder/vocabulary.hpp"
#include "model/model.hpp"
#include "train/config.hpp"

namespace sluice::train {

// A split ready for the model: encoded sentences and their gold tags.
struct EncodedSplit {
  std::vector<model::EncodedSentence> sentences;
  std::vector<std::vector<std::uint32_t>> tags;
  std::size_t size() const { return sentences.size(); }
};

struct TrainingData {
  std::vector<data::Corpus> corpora;  // task order
  std::size_t main_task = 0;
  encoder::Vocabulary vocab;
  // [task] -> split name -> encoded split
  std::vector<std::map<std::string, EncodedSplit>> splits;

  const EncodedSplit& split(std::size_t task, const std::string& name) const;
};

EncodedSplit encode_split(const encoder::Vocabulary& vocab,
                          const data::Split& split);

// Builds the vocabulary from the train splits and encodes every split.
TrainingData prepare_data(std::vector<data::Corpus> corpora,
                          std::size_t main_task, std::size_t min_count);

// Loads each configured task's files. Missing train or dev paths are errors.
TrainingData load_training_data(const TrainConfig& config);

model::ModelConfig model_config(const TrainConfig& config,
                                const TrainingData& data);

// Constructs the model, then applies the preset and the ablation flags.
std::unique_ptr<model::SluiceModel> build_model(const TrainConfig& config,
                                                const TrainingData& data);

// lr0 / (1 + decay * epoch), epoch 0-based.
double lr_schedule(std::size_t epoch, const TrainConfig& config);

struct EarlyStop {
  bool stop = false;
  std::size_t best_epoch = 1;  // 1-based
};

// Stops once the best (strictly improved) value is `patience` epochs old.
EarlyStop early_stop_check(const std::vector<double>& history,
                           std::size_t patience);

// Argmax with ties going to the lowest label id.
std::size_t argmax(std::span<const double> logits);

// Token accuracy of task `task` over `split`.
double evaluate_accuracy(model::SluiceModel& model, const EncodedSplit& split,
                         std::size_t task);

struct EpochStats {
  std::vector<double> train_loss;    // mean batch loss per task, NaN if unseen
  std::vector<std::size_t> batches;  // per task
  double penalty = 0.0;              // mean orthogonality term
  double alpha_grad_norm = 0.0;      // largest alpha gradient norm seen
  double seconds = 0.0;
};

// One pass of uniformly sampled task batches with an update after each.
EpochStats train_epoch(model::SluiceModel& model, const TrainingData& data,
                       diff::Rng& rng, std::size_t batch_size, double lr);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  std::vector<double> train_loss;
  std::vector<double> dev_accuracy;
  double penalty = 0.0;
  double orthogonality = 0.0;
  double alpha_grad_norm = 0.0;
  double seconds = 0.0;  // reported separately from the metrics JSON
  std::vector<std::vector<double>> alpha;  // per layer, row-major (to, from)
  std::vector<std::vector<double>> beta;   // per task
};

struct MetricsRecord {
  std::vector<std::string> tasks;
  std::size_t main_task = 0;
  std::string preset;
  model::Ablation ablation;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
  // task -> split -> accuracy of the best snapshot
  std::map<std::string, std::map<std::string, double>> final_accuracy;
};

// Deterministic: excludes wall-clock times.
std::string metrics_json(const MetricsRecord& record);
std::string timing_json(const MetricsRecord& record);

// Values of every parameter, in model order.
std::vector<diff::Tensor> capture(model::SluiceModel& model);
void restore(model::SluiceModel& model, const std::vector<diff::Tensor>& values);

struct TrainingResult {
  MetricsRecord metrics;
  std::unique_ptr<model::SluiceModel> model;  // holds the best snapshot
};

// Full loop with early stopping on main-task dev accuracy; the best snapshot
// is evaluated on dev, test and every extra split.
// `on_epoch` sees each epoch record as soon as it is complete.
TrainingResult run_training(
    const TrainConfig& config, const TrainingData& data,
    const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace sluice::train
