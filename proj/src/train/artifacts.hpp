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

// Run artifacts: manifests, parameter snapshots and the output directory
// layout of a training run.
//
// Snapshot layout (text, one record per line, fields separated by a space):
//
//   sluice-snapshot <format>
//   config <n>            followed by n lines of "key=value"
//   main_task <index>
//   words <n>             followed by n words; id 0 (<unk>) is implicit
//   chars <n>             followed by n characters; id 0 is implicit
//   task <name> <n>       followed by n labels in id order; once per task
//   param <name> <rows> <cols>
//                         followed by `rows` lines of `cols` hexfloats
//   end
#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "data/corpus.hpp"
#include "encoder/vocabulary.hpp"
#include "model/model.hpp"
#include "train/config.hpp"
#include "train/trainer.hpp"

namespace sluice::train {

inline constexpr int kSnapshotFormat = 1;
inline constexpr int kManifestFormat = 1;

const char* tool_version();

// Lower-case hex SHA-256 of a file's bytes. Throws IoError if unreadable.
std::string sha256_file(const std::string& path);

struct CorpusFile {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;  // "train", "synthetic", "noise", "ablate"
  std::string tool_version;
  TrainConfig config;
  std::vector<CorpusFile> corpora;
  std::uint64_t seed = 0;
  std::string output_dir;
  // Command-specific settings (sweep, seeds, mode, ...), as text.
  std::map<std::string, std::string> settings;
};

// Every distinct corpus path named by the config, in key order.
std::vector<std::string> corpus_paths(const TrainConfig& config);

RunManifest make_manifest(const std::string& command, const TrainConfig& config,
                          const std::string& output_dir);
std::string manifest_json(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& json_text);
void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);
// Throws InputError naming the first corpus whose checksum changed.
void verify_corpora(const RunManifest& manifest);

// Everything needed to rebuild a trained model without its corpora.
struct LoadedModel {
  TrainConfig config;
  std::size_t main_task = 0;
  encoder::Vocabulary vocab;
  std::vector<data::TaskSpec> tasks;
  std::unique_ptr<model::SluiceModel> model;

  std::size_t task_index(const std::string& name) const;
};

void write_snapshot(std::ostream& out, const TrainConfig& config,
                    const TrainingData& data, model::SluiceModel& model);
// Throws ParseError on malformed text and ContractError when the parameters
// do not fit the model the header describes.
LoadedModel read_snapshot(std::istream& in);
LoadedModel load_snapshot(const std::string& path);

// Accuracy of the snapshot's task on a CoNLL file read with that task's tag
// column. Tags unseen in training never match a prediction.
double evaluate_file(LoadedModel& loaded, std::size_t task,
                     const std::string& path);

using LogFn = std::function<void(const std::string&)>;

// Output files of a training run inside its directory.
struct RunFiles {
  static constexpr const char* kManifest = "manifest.json";
  static constexpr const char* kMetrics = "metrics.json";
  static constexpr const char* kTiming = "timing.json";
  static constexpr const char* kAlpha = "alpha.csv";
  static constexpr const char* kBeta = "beta.csv";
  static constexpr const char* kSnapshot = "model.snapshot";
};

// Writes the manifest, trains, then writes metrics, timing, alpha/beta CSVs
// and the snapshot of the best model.
MetricsRecord train_to_directory(const TrainConfig& config,
                                 const std::string& output_dir,
                                 const LogFn& log = {});
// Replays a manifest after verifying corpus checksums. An empty
// `output_dir` reuses the manifest's directory.
MetricsRecord train_from_manifest(const std::string& manifest_path,
                                  const std::string& output_dir,
                                  const LogFn& log = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sluice::train
