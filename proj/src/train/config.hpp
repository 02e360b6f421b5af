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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "model/model.hpp"

namespace sluice::train {

struct TaskSource {
  std::string name;
  std::size_t column = 1;  // tag column; column 0 holds the token

  bool operator==(const TaskSource&) const = default;
};

// Flat key=value run configuration. Every key has a default; unknown keys
// and malformed values raise UsageError naming the key.
struct TrainConfig {
  model::Preset preset = model::Preset::kLearnedSluice;
  double lr = 0.1;
  double lr_decay = 0.05;
  std::size_t patience = 2;
  std::size_t max_epochs = 30;
  std::size_t batch_size = 1;
  std::uint64_t seed = 1;
  double gamma = 0.01;
  std::map<std::string, double> lambdas;  // missing tasks use 1.0

  std::vector<TaskSource> tasks;
  std::string main_task;  // empty selects the first task

  // Corpus paths. `train`, `dev` and `test` apply to every task unless a
  // per-task entry (key "train.NAME") overrides them.
  std::string train;
  std::string dev;
  std::string test;
  std::map<std::string, std::string> task_paths;  // "train.NAME" -> path
  std::map<std::string, std::string> extra_tests;  // split name -> path

  std::size_t layers = 3;
  std::size_t hidden = 100;
  std::size_t subspaces = 2;
  std::size_t word_dim = 64;
  std::size_t char_dim = 100;
  std::size_t char_hidden = 50;
  std::size_t mlp_hidden = 100;
  std::size_t min_count = 1;

  model::Ablation ablation;

  bool operator==(const TrainConfig&) const = default;

  // Path of `split` ("train", "dev", "test") for task `name`; empty if unset.
  std::string path_for(const std::string& split, const std::string& name) const;
  std::size_t main_index() const;
  void validate() const;
};

// Applies one key=value assignment.
void set_key(TrainConfig& config, std::string_view key, std::string_view value);

TrainConfig parse_config(std::string_view text);
// Relative corpus paths are resolved against the config file's directory
// and come back absolute, so manifests replay from any working directory.
TrainConfig load_config(const std::string& path);

// Canonical text: every key, fixed order, one per line.
std::string serialize_config(const TrainConfig& config);

std::vector<std::string> config_keys();

}  // namespace sluice::train
