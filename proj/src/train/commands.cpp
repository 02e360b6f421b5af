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


#include "train/commands.hpp"

#include <charconv>
#include <filesystem>

#include "data/toy.hpp"
#include "errors.hpp"
#include "model/export.hpp"

namespace sluice::train {

namespace fs = std::filesystem;

namespace {

std::string join_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::size_t to_size(const std::string& key, std::string_view text) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError("manifest setting '" + key + "': bad integer '" + std::string(text) + "'", 1);
  }
  return v;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError("manifest setting '" + key + "': bad number '" + text + "'", 1);
  }
  return v;
}

const std::string& setting(const RunManifest& m, const std::string& key) {
  auto it = m.settings.find(key);
  if (it == m.settings.end()) throw ParseError("manifest lacks setting '" + key + "'", 1);
  return it->second;
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    out.push_back(to_size(key, std::string_view(text).substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

void start_run(const RunManifest& m, const std::string& dir) {
  fs::create_directories(dir);
  write_manifest(m, (fs::path(dir) / RunFiles::kManifest).string());
}

std::string out_path(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

SyntheticSettings synthetic_settings(const RunManifest& m) {
  SyntheticSettings s;
  s.sweep = parse_sizes("sweep", setting(m, "sweep"));
  s.seeds = to_size("seeds", setting(m, "seeds"));
  s.epochs = to_size("epochs", setting(m, "epochs"));
  return s;
}

NoiseSettings noise_settings(const RunManifest& m) {
  NoiseSettings s;
  s.seeds = to_size("seeds", setting(m, "seeds"));
  s.max_epochs = to_size("max_epochs", setting(m, "max_epochs"));
  s.chunk_sentences = to_size("chunk_sentences", setting(m, "chunk_sentences"));
  s.pos_sentences = to_size("pos_sentences", setting(m, "pos_sentences"));
  s.plateau.window = to_size("plateau_window", setting(m, "plateau_window"));
  s.plateau.min_gain = to_double("plateau_min_gain", setting(m, "plateau_min_gain"));
  s.plateau.min_epochs = to_size("plateau_min_epochs", setting(m, "plateau_min_epochs"));
  return s;
}

std::vector<SyntheticRow> run_synthetic(const RunManifest& m, const std::string& dir,
                                        const LogFn& log) {
  const auto mode = parse_aux_mode(setting(m, "mode"));
  if (!mode) throw ParseError("manifest setting 'mode': unknown mode", 1);
  const SyntheticSettings s = synthetic_settings(m);
  std::size_t largest = 0;
  for (std::size_t n : s.sweep) largest = std::max(largest, n);
  start_run(m, dir);
  const data::Corpus source = synthetic_source(m.config, largest);
  auto rows = run_synthetic_sweep(*mode, m.config, source, s, log);
  write_text_file(out_path(dir, ExperimentFiles::kSynthetic), synthetic_csv(rows));
  return rows;
}

NoiseSummary run_noise(const RunManifest& m, const std::string& dir, const LogFn& log) {
  const NoiseSettings s = noise_settings(m);
  start_run(m, dir);
  const auto [chunk, pos] = noise_sources(m.config, s);
  NoiseSummary summary = run_noise_seeds(m.config, chunk, pos, s, log);
  write_text_file(out_path(dir, ExperimentFiles::kNoiseCurves), noise_csv(summary.curves));
  write_text_file(out_path(dir, ExperimentFiles::kNoiseSummary), noise_summary_json(summary, s));
  return summary;
}

std::vector<AblationRow> run_ablate(const RunManifest& m, const std::string& dir,
                                    const LogFn& log) {
  const std::size_t jobs = to_size("jobs", setting(m, "jobs"));
  start_run(m, dir);
  const TrainingData data = load_training_data(m.config);
  auto rows = run_ablation(m.config, data, jobs, log);
  write_text_file(out_path(dir, ExperimentFiles::kAblation), ablation_csv(rows));
  return rows;
}

}  // namespace

data::Corpus synthetic_source(const TrainConfig& config, std::size_t min_train) {
  if (!config.tasks.empty()) {
    const std::string& name = config.tasks[config.main_index()].name;
    if (!config.path_for("train", name).empty()) {
      return experiment_source(config, name, data::kToyPos, min_train, config.seed);
    }
  }
  return experiment_source(config, "POS", data::kToyPos, min_train, config.seed);
}

std::pair<data::Corpus, data::Corpus> noise_sources(const TrainConfig& config,
                                                    const NoiseSettings& settings) {
  if (config.tasks.size() >= 2) {
    const std::size_t main = config.main_index();
    const std::size_t other = main == 0 ? 1 : 0;
    const std::string& a = config.tasks[main].name;
    const std::string& b = config.tasks[other].name;
    if (!config.path_for("train", a).empty() && !config.path_for("train", b).empty()) {
      return {experiment_source(config, a, data::kToyChunk, settings.chunk_sentences, config.seed),
              experiment_source(config, b, data::kToyPos, settings.pos_sentences, config.seed)};
    }
  }
  const std::size_t n = std::max(settings.chunk_sentences, settings.pos_sentences);
  return {experiment_source(config, "CHUNK", data::kToyChunk, n, config.seed),
          experiment_source(config, "POS", data::kToyPos, n, config.seed)};
}

std::vector<SyntheticRow> synthetic_to_directory(const TrainConfig& config, AuxMode mode,
                                                 const SyntheticSettings& settings,
                                                 const std::string& output_dir,
                                                 const LogFn& log) {
  if (settings.sweep.empty()) throw UsageError("synthetic sweep is empty");
  RunManifest m = make_manifest("synthetic", config, output_dir);
  m.settings["mode"] = std::string(aux_mode_name(mode));
  m.settings["sweep"] = join_sizes(settings.sweep);
  m.settings["seeds"] = std::to_string(settings.seeds);
  m.settings["epochs"] = std::to_string(settings.epochs);
  return run_synthetic(m, output_dir, log);
}

NoiseSummary noise_to_directory(const TrainConfig& config, const NoiseSettings& settings,
                                const std::string& output_dir, const LogFn& log) {
  RunManifest m = make_manifest("noise", config, output_dir);
  m.settings["seeds"] = std::to_string(settings.seeds);
  m.settings["max_epochs"] = std::to_string(settings.max_epochs);
  m.settings["chunk_sentences"] = std::to_string(settings.chunk_sentences);
  m.settings["pos_sentences"] = std::to_string(settings.pos_sentences);
  m.settings["plateau_window"] = std::to_string(settings.plateau.window);
  m.settings["plateau_min_gain"] = model::format_double(settings.plateau.min_gain);
  m.settings["plateau_min_epochs"] = std::to_string(settings.plateau.min_epochs);
  m.settings["plateau_rule"] = settings.plateau.describe();
  return run_noise(m, output_dir, log);
}

std::vector<AblationRow> ablation_to_directory(const TrainConfig& config, std::size_t jobs,
                                               const std::string& output_dir,
                                               const LogFn& log) {
  if (jobs == 0) throw UsageError("--jobs must be >= 1");
  config.validate();
  RunManifest m = make_manifest("ablate", config, output_dir);
  m.settings["jobs"] = std::to_string(jobs);
  return run_ablate(m, output_dir, log);
}

std::string replay_manifest(const std::string& manifest_path, const std::string& output_dir,
                            const LogFn& log) {
  RunManifest m = read_manifest(manifest_path);
  verify_corpora(m);
  if (!output_dir.empty()) m.output_dir = output_dir;
  if (m.command == "train") {
    train_from_manifest(manifest_path, m.output_dir, log);
  } else if (m.command == "synthetic") {
    run_synthetic(m, m.output_dir, log);
  } else if (m.command == "noise") {
    run_noise(m, m.output_dir, log);
  } else if (m.command == "ablate") {
    run_ablate(m, m.output_dir, log);
  } else {
    throw ParseError("manifest names unknown command '" + m.command + "'", 1);
  }
  return m.command;
}

}  // namespace sluice::train
