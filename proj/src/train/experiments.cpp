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


#include "train/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "data/toy.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "model/export.hpp"
#include "model/preset.hpp"

namespace sluice::train {

using model::format_double;

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

data::Corpus experiment_source(const TrainConfig& config, const std::string& task,
                               std::size_t toy_column, std::size_t min_train,
                               std::uint64_t toy_seed) {
  for (const TaskSource& t : config.tasks) {
    if (t.name != task) continue;
    const std::string path = config.path_for("train", t.name);
    if (path.empty()) break;
    data::Corpus c;
    c.task.name = t.name;
    c.train = data::load_conll(path, t.column, c.task.labels);
    return c;
  }
  data::ToySplits splits;
  splits.train = min_train;
  splits.dev = 0;
  splits.test = 0;
  splits.ood = 0;
  data::Corpus c = data::toy_corpus(task, static_cast<data::ToyColumn>(toy_column),
                                    toy_seed, splits);
  return c;
}

namespace {

data::Corpus head_of(const data::Corpus& source, std::size_t n) {
  if (source.train.size() < n) {
    throw InputError("task '" + source.task.name + "' needs " + std::to_string(n) +
                     " train sentences, source has " +
                     std::to_string(source.train.size()));
  }
  data::Corpus c;
  c.task = source.task;
  c.train.assign(source.train.begin(), source.train.begin() + n);
  return c;
}

// Trains for exactly `epochs` epochs (or until `stop` says so) without dev
// evaluation. `after_epoch` runs after every epoch.
void train_fixed(model::SluiceModel& model, const TrainConfig& config,
                 const TrainingData& data, std::size_t epochs,
                 const std::function<bool()>& after_epoch) {
  diff::Rng rng = diff::Rng(config.seed).fork(2);
  for (std::size_t e = 0; e < epochs; ++e) {
    train_epoch(model, data, rng, config.batch_size, lr_schedule(e, config));
    if (after_epoch && after_epoch()) break;
  }
}

}  // namespace

// ---- Random/Copy ---------------------------------------------------------

std::string_view aux_mode_name(AuxMode mode) {
  return mode == AuxMode::kRandom ? "random" : "copy";
}

std::optional<AuxMode> parse_aux_mode(std::string_view name) {
  if (name == "random") return AuxMode::kRandom;
  if (name == "copy") return AuxMode::kCopy;
  return std::nullopt;
}

double sharing_ratio(const model::SluiceModel& model, std::size_t target) {
  if (target >= model.tasks()) throw ContractError("sharing_ratio: task out of range");
  const std::size_t subs = model.subspaces();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 1; k <= model.layers(); ++k) {
    const model::AlphaUnit& unit = model.alpha(k);
    for (std::size_t s = 0; s < subs; ++s) {
      const std::size_t to = unit.index(target, s);
      double within = 0.0;
      double cross = 0.0;
      for (std::size_t from = 0; from < unit.dim(); ++from) {
        const double v = std::abs(unit.entry(to, from));
        (from / subs == target ? within : cross) += v;
      }
      sum += within > 0.0 ? cross / within : std::numeric_limits<double>::infinity();
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

double run_synthetic_experiment(std::size_t n, AuxMode mode,
                                const TrainConfig& config,
                                const data::Corpus& source, std::size_t epochs) {
  if (n == 0) throw UsageError("synthetic experiment needs n >= 1");
  data::Corpus target = head_of(source, n);
  target.task.is_main = true;
  diff::Rng relabel = diff::Rng(config.seed).fork(3);
  data::Corpus aux = mode == AuxMode::kRandom ? data::make_random_relabel(target, relabel)
                                              : data::make_copy_aux(target);
  TrainingData data = prepare_data({std::move(target), std::move(aux)}, 0, config.min_count);
  TrainConfig c = config;
  c.preset = model::Preset::kLearnedSluice;
  c.ablation = model::Ablation{};
  auto model = build_model(c, data);
  train_fixed(*model, c, data, epochs, {});
  return sharing_ratio(*model, 0);
}

std::vector<SyntheticRow> run_synthetic_sweep(AuxMode mode, const TrainConfig& config,
                                              const data::Corpus& source,
                                              const SyntheticSettings& settings,
                                              const ProgressFn& progress) {
  if (settings.seeds == 0) throw UsageError("synthetic sweep needs at least one seed");
  std::vector<SyntheticRow> rows;
  for (std::size_t n : settings.sweep) {
    SyntheticRow row;
    row.mode = mode;
    row.n = n;
    for (std::size_t i = 0; i < settings.seeds; ++i) {
      TrainConfig c = config;
      c.seed = config.seed + i;
      row.ratios.push_back(run_synthetic_experiment(n, mode, c, source, settings.epochs));
      if (progress) {
        progress(std::string(aux_mode_name(mode)) + " n " + std::to_string(n) + " seed " +
                 std::to_string(c.seed) + " ratio " + format_double(row.ratios.back()));
      }
    }
    row.median_ratio = median(row.ratios);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string synthetic_csv(const std::vector<SyntheticRow>& rows) {
  std::size_t seeds = 0;
  for (const auto& r : rows) seeds = std::max(seeds, r.ratios.size());
  std::ostringstream out;
  out << "mode,n,median_ratio";
  for (std::size_t i = 0; i < seeds; ++i) out << ",ratio_seed_" << i + 1;
  out << '\n';
  for (const auto& r : rows) {
    out << aux_mode_name(r.mode) << ',' << r.n << ',' << format_double(r.median_ratio);
    for (std::size_t i = 0; i < seeds; ++i) {
      out << ',';
      if (i < r.ratios.size()) out << format_double(r.ratios[i]);
    }
    out << '\n';
  }
  return out.str();
}

// ---- Noise fitting -------------------------------------------------------

std::string PlateauRule::describe() const {
  return "stop when train accuracy gains less than " + format_double(min_gain) +
         " (absolute) over " + std::to_string(window) + " epochs, checked from epoch " +
         std::to_string(min_epochs) + " on";
}

bool plateau_reached(const std::vector<double>& curve, const PlateauRule& rule) {
  if (rule.window == 0 || curve.size() <= rule.window || curve.size() < rule.min_epochs) {
    return false;
  }
  return curve.back() - curve[curve.size() - 1 - rule.window] < rule.min_gain;
}

std::vector<NoiseCurve> run_noise_experiment(const TrainConfig& config,
                                             const data::Corpus& chunk_source,
                                             const data::Corpus& pos_source,
                                             const NoiseSettings& settings,
                                             const ProgressFn& progress) {
  if (settings.max_epochs == 0) throw UsageError("noise experiment needs max_epochs >= 1");
  diff::Rng relabel = diff::Rng(config.seed).fork(3);
  data::NoiseCorpora corpora = data::make_noise_corpus(
      chunk_source, pos_source, relabel, settings.chunk_sentences, settings.pos_sentences);

  const model::Preset presets[] = {model::Preset::kSingleTask, model::Preset::kHardSharing,
                                   model::Preset::kLearnedSluice};
  std::vector<NoiseCurve> curves;
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<data::Corpus> tasks{corpora.main};
    if (presets[a] != model::Preset::kSingleTask) tasks.push_back(corpora.auxiliary);
    const TrainingData data = prepare_data(std::move(tasks), 0, config.min_count);
    TrainConfig c = config;
    c.preset = presets[a];
    c.ablation = model::Ablation{};
    auto model = build_model(c, data);

    NoiseCurve curve;
    curve.architecture = kNoiseArchitectures[a];
    curve.seed = config.seed;
    const EncodedSplit& train = data.split(0, "train");
    train_fixed(*model, c, data, settings.max_epochs, [&] {
      curve.train_accuracy.push_back(evaluate_accuracy(*model, train, 0));
      curve.plateaued = plateau_reached(curve.train_accuracy, settings.plateau);
      return curve.plateaued;
    });
    if (progress) {
      progress(curve.architecture + " seed " + std::to_string(curve.seed) + " epochs " +
               std::to_string(curve.train_accuracy.size()) + " final " +
               format_double(curve.train_accuracy.back()));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

NoiseSummary run_noise_seeds(const TrainConfig& config, const data::Corpus& chunk_source,
                             const data::Corpus& pos_source, const NoiseSettings& settings,
                             const ProgressFn& progress) {
  if (settings.seeds == 0) throw UsageError("noise experiment needs at least one seed");
  NoiseSummary summary;
  for (std::size_t i = 0; i < settings.seeds; ++i) {
    TrainConfig c = config;
    c.seed = config.seed + i;
    auto curves = run_noise_experiment(c, chunk_source, pos_source, settings, progress);
    for (auto& curve : curves) summary.curves.push_back(std::move(curve));
  }
  for (const char* arch : kNoiseArchitectures) {
    std::vector<double> final_acc;
    std::vector<double> epoch3;
    for (const NoiseCurve& c : summary.curves) {
      if (c.architecture != arch) continue;
      final_acc.push_back(c.train_accuracy.back());
      epoch3.push_back(c.train_accuracy[std::min<std::size_t>(2, c.train_accuracy.size() - 1)]);
    }
    summary.median_final.push_back(median(final_acc));
    summary.median_epoch3.push_back(median(epoch3));
  }
  return summary;
}

std::string noise_csv(const std::vector<NoiseCurve>& curves) {
  std::ostringstream out;
  out << "architecture,seed,epoch,train_accuracy\n";
  for (const NoiseCurve& c : curves) {
    for (std::size_t e = 0; e < c.train_accuracy.size(); ++e) {
      out << c.architecture << ',' << c.seed << ',' << e + 1 << ','
          << format_double(c.train_accuracy[e]) << '\n';
    }
  }
  return out.str();
}

std::string noise_summary_json(const NoiseSummary& summary, const NoiseSettings& settings) {
  nlohmann::ordered_json j;
  j["plateau_rule"] = settings.plateau.describe();
  j["plateau_window"] = settings.plateau.window;
  j["plateau_min_gain"] = settings.plateau.min_gain;
  j["plateau_min_epochs"] = settings.plateau.min_epochs;
  j["max_epochs"] = settings.max_epochs;
  j["seeds"] = settings.seeds;
  j["chunk_sentences"] = settings.chunk_sentences;
  j["pos_sentences"] = settings.pos_sentences;
  for (std::size_t a = 0; a < summary.median_final.size(); ++a) {
    auto& entry = j["architectures"][kNoiseArchitectures[a]];
    entry["median_final_train_accuracy"] = summary.median_final[a];
    entry["median_epoch3_train_accuracy"] = summary.median_epoch3[a];
  }
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (const NoiseCurve& c : summary.curves) {
    runs.push_back({{"architecture", c.architecture},
                    {"seed", c.seed},
                    {"epochs", c.train_accuracy.size()},
                    {"plateaued", c.plateaued}});
  }
  return j.dump(2) + "\n";
}

// ---- Ablation grid -------------------------------------------------------

TrainConfig ablation_cell_config(const TrainConfig& base, const model::Ablation& cell) {
  TrainConfig c = base;
  c.preset = model::Preset::kLearnedSluice;
  c.ablation = cell;
  return c;
}

std::vector<AblationRow> run_ablation(const TrainConfig& base, const TrainingData& data,
                                      std::size_t jobs, const ProgressFn& progress) {
  if (jobs == 0) throw UsageError("--jobs must be >= 1");
  const auto grid = model::ablation_grid();
  std::vector<AblationRow> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  const std::string main_name = data.corpora[data.main_task].task.name;

  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        const TrainConfig c = ablation_cell_config(base, grid[i]);
        const TrainingResult r = run_training(c, data);
        AblationRow& row = rows[i];
        row.ablation = grid[i];
        const auto& acc = r.metrics.final_accuracy.at(main_name);
        row.dev_accuracy = acc.at("dev");
        auto test = acc.find("test");
        row.test_accuracy = test == acc.end() ? std::numeric_limits<double>::quiet_NaN()
                                              : test->second;
        for (const EpochRecord& e : r.metrics.epochs) {
          row.max_alpha_grad_norm = std::max(row.max_alpha_grad_norm, e.alpha_grad_norm);
        }
        row.epochs = r.metrics.epochs.size();
        row.best_epoch = r.metrics.best_epoch;
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress("cell " + std::to_string(i + 1) + " alpha " +
                   std::string(model::alpha_mode_name(grid[i].alpha)) + " mixing " +
                   std::string(model::mixing_name(grid[i].mixing)) + " subspaces " +
                   (grid[i].subspaces ? "on" : "off") + " dev " +
                   format_double(row.dev_accuracy));
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::min(jobs, grid.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "alpha,mixing,subspaces,dev_accuracy,test_accuracy,max_alpha_grad_norm,epochs,"
         "best_epoch\n";
  for (const AblationRow& r : rows) {
    out << model::alpha_mode_name(r.ablation.alpha) << ','
        << model::mixing_name(r.ablation.mixing) << ','
        << (r.ablation.subspaces ? "on" : "off") << ',' << format_double(r.dev_accuracy)
        << ',' << (std::isnan(r.test_accuracy) ? std::string() : format_double(r.test_accuracy))
        << ',' << format_double(r.max_alpha_grad_norm) << ',' << r.epochs << ','
        << r.best_epoch << '\n';
  }
  return out.str();
}

}  // namespace sluice::train
