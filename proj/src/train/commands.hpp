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


// Artifact-producing commands. Each writes its manifest into the output
// directory before any training starts, and its outputs depend only on that
// manifest.
#pragma once

#include <string>

#include "train/artifacts.hpp"
#include "train/experiments.hpp"

namespace sluice::train {

struct ExperimentFiles {
  static constexpr const char* kSynthetic = "synthetic.csv";
  static constexpr const char* kNoiseCurves = "noise_curves.csv";
  static constexpr const char* kNoiseSummary = "noise_summary.json";
  static constexpr const char* kAblation = "ablation.csv";
};

// Synthetic source: the main task's train file when the config names one,
// else generated POS sentences. The toy seed is config.seed.
data::Corpus synthetic_source(const TrainConfig& config, std::size_t min_train);

// Noise sources: (main task, first other task) train files when the config
// names both, else generated CHUNK and POS sentences.
std::pair<data::Corpus, data::Corpus> noise_sources(const TrainConfig& config,
                                                    const NoiseSettings& settings);

std::vector<SyntheticRow> synthetic_to_directory(const TrainConfig& config, AuxMode mode,
                                                 const SyntheticSettings& settings,
                                                 const std::string& output_dir,
                                                 const LogFn& log = {});

NoiseSummary noise_to_directory(const TrainConfig& config, const NoiseSettings& settings,
                                const std::string& output_dir, const LogFn& log = {});

std::vector<AblationRow> ablation_to_directory(const TrainConfig& config, std::size_t jobs,
                                               const std::string& output_dir,
                                               const LogFn& log = {});

// Reruns whatever command wrote the manifest. An empty `output_dir` reuses
// the manifest's directory. Returns the command name.
std::string replay_manifest(const std::string& manifest_path, const std::string& output_dir,
                            const LogFn& log = {});

}  // namespace sluice::train
