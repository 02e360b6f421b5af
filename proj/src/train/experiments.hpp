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

// Experiment protocols: the Random/Copy auxiliary-task sweep, noise fitting
// and the ablation grid.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "data/corpus.hpp"
#include "model/model.hpp"
#include "train/config.hpp"
#include "train/trainer.hpp"

namespace sluice::train {

using ProgressFn = std::function<void(const std::string&)>;

double median(std::vector<double> values);

// Source corpus for an experiment. When `config` names task `task` and gives
// it a train path, that file is read with the task's column; otherwise a toy
// corpus with `min_train` train sentences of `toy_column` is generated from
// `toy_seed`. Only the train split is filled.
data::Corpus experiment_source(const TrainConfig& config, const std::string& task,
                               std::size_t toy_column, std::size_t min_train,
                               std::uint64_t toy_seed);

// ---- Random/Copy ---------------------------------------------------------

enum class AuxMode { kRandom, kCopy };

std::string_view aux_mode_name(AuxMode mode);
std::optional<AuxMode> parse_aux_mode(std::string_view name);

// Mean over layers and the target's subspaces of
//   sum |alpha(target <- other task)| / sum |alpha(target <- target)|.
double sharing_ratio(const model::SluiceModel& model, std::size_t target);

struct SyntheticSettings {
  std::vector<std::size_t> sweep = {100, 500, 2000};
  std::size_t seeds = 5;
  std::size_t epochs = 3;  // fixed; no dev-based stopping
};

// Trains a two-task learned_sluice model on the first n train sentences of
// `source` (task 0) plus the auxiliary built from them, with config.seed.
// Returns the sharing ratio into task 0. Throws InputError if the source
// has fewer than n train sentences.
double run_synthetic_experiment(std::size_t n, AuxMode mode,
                                const TrainConfig& config,
                                const data::Corpus& source,
                                std::size_t epochs);

struct SyntheticRow {
  AuxMode mode = AuxMode::kRandom;
  std::size_t n = 0;
  std::vector<double> ratios;  // one per seed
  double median_ratio = 0.0;
};

// Seeds are config.seed, config.seed + 1, ...
std::vector<SyntheticRow> run_synthetic_sweep(AuxMode mode,
                                              const TrainConfig& config,
                                              const data::Corpus& source,
                                              const SyntheticSettings& settings,
                                              const ProgressFn& progress = {});

// Header "mode,n,median_ratio,ratio_seed_1,...".
std::string synthetic_csv(const std::vector<SyntheticRow>& rows);

// ---- Noise fitting -------------------------------------------------------

struct PlateauRule {
  std::size_t window = 3;   // epochs
  double min_gain = 0.001;  // absolute accuracy, i.e. 0.1 percentage points
  // Curves sit at the majority-class rate for several epochs before fitting
  // starts; the rule is not checked before this epoch.
  std::size_t min_epochs = 10;
  std::string describe() const;
};

// True once the curve has at least min_epochs points and gained less than
// min_gain over the last `window` epochs.
bool plateau_reached(const std::vector<double>& curve, const PlateauRule& rule);

struct NoiseSettings {
  std::size_t seeds = 5;
  std::size_t max_epochs = 60;
  std::size_t chunk_sentences = 200;
  std::size_t pos_sentences = 100;
  PlateauRule plateau;
};

struct NoiseCurve {
  std::string architecture;  // "single", "hard", "sluice"
  std::uint64_t seed = 0;
  std::vector<double> train_accuracy;  // main task, after each epoch
  bool plateaued = false;
};

// One seed: relabels the chunk source with that seed, then trains the three
// architectures on the result.
std::vector<NoiseCurve> run_noise_experiment(const TrainConfig& config,
                                             const data::Corpus& chunk_source,
                                             const data::Corpus& pos_source,
                                             const NoiseSettings& settings,
                                             const ProgressFn& progress = {});

struct NoiseSummary {
  std::vector<NoiseCurve> curves;
  // Medians over seeds, per architecture in single/hard/sluice order.
  std::vector<double> median_final;
  std::vector<double> median_epoch3;
};

NoiseSummary run_noise_seeds(const TrainConfig& config,
                             const data::Corpus& chunk_source,
                             const data::Corpus& pos_source,
                             const NoiseSettings& settings,
                             const ProgressFn& progress = {});

inline constexpr const char* kNoiseArchitectures[] = {"single", "hard", "sluice"};

// Long format: "architecture,seed,epoch,train_accuracy".
std::string noise_csv(const std::vector<NoiseCurve>& curves);
// Medians, plateau rule and per-curve epoch counts.
std::string noise_summary_json(const NoiseSummary& summary,
                               const NoiseSettings& settings);

// ---- Ablation grid -------------------------------------------------------

struct AblationRow {
  model::Ablation ablation;
  double dev_accuracy = 0.0;   // main task, best snapshot
  double test_accuracy = 0.0;  // NaN without a test split
  double max_alpha_grad_norm = 0.0;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
};

// Config of one grid cell: the base config under learned_sluice with the
// cell's ablation flags.
TrainConfig ablation_cell_config(const TrainConfig& base, const model::Ablation& cell);

// Runs every cell of model::ablation_grid(); at most `jobs` cells at once.
std::vector<AblationRow> run_ablation(const TrainConfig& base,
                                      const TrainingData& data, std::size_t jobs,
                                      const ProgressFn& progress = {});

// Header "alpha,mixing,subspaces,dev_accuracy,test_accuracy,
// max_alpha_grad_norm,epochs,best_epoch".
std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace sluice::train
