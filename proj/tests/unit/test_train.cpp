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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "data/toy.hpp"
#include "diff/tape.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "model/preset.hpp"
#include "train/config.hpp"
#include "train/trainer.hpp"

using namespace sluice;
using namespace sluice::train;

namespace {

data::ToySplits tiny_splits() {
  data::ToySplits s;
  s.train = 24;
  s.dev = 8;
  s.test = 8;
  s.ood = 8;
  return s;
}

TrainingData tiny_data(std::size_t tasks = 2) {
  std::vector<data::Corpus> corpora;
  corpora.push_back(data::toy_corpus("CHUNK", data::kToyChunk, 5, tiny_splits()));
  if (tasks > 1) {
    corpora.push_back(data::toy_corpus("POS", data::kToyPos, 5, tiny_splits()));
  }
  return prepare_data(std::move(corpora), 0, 1);
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.tasks = {{"CHUNK", data::kToyChunk}, {"POS", data::kToyPos}};
  c.layers = 2;
  c.hidden = 4;
  c.word_dim = 6;
  c.char_dim = 4;
  c.char_hidden = 3;
  c.mlp_hidden = 5;
  c.max_epochs = 4;
  c.train = "unused";
  c.dev = "unused";
  return c;
}

std::vector<std::vector<double>> parameter_values(model::SluiceModel& m) {
  std::vector<std::vector<double>> out;
  for (auto* p : m.parameters()) {
    const auto v = p->value().values();
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

std::size_t frozen_count(const diff::Parameter& p) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.value().size(); ++i) n += p.is_frozen(i);
  return n;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sluice_train_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config round-trips through its text form") {
  const std::string text =
      "preset = cross_stitch\n"
      "# comment\n"
      "lr = 0.2\nlr_decay = 0\npatience = 3\nmax_epochs = 7\nbatch_size = 2\n"
      "seed = 42\ngamma = 0.5\nlambda = CHUNK:1,POS:0.25\n"
      "tasks = CHUNK:2,POS:1\nmain_task = CHUNK\n"
      "train = a.conll\ndev = b.conll\ntest = c.conll\n"
      "train.POS = pos_train.conll\nextra_test = ood:d.conll\n"
      "layers = 2\nhidden = 8\nsubspace_count = 4\nword_dim = 3\nchar_dim = 5\n"
      "char_hidden = 6\nmlp_hidden = 7\nmin_count = 2\n"
      "alpha = constant\nsubspaces = off\nmixing = skip\n";
  const TrainConfig c = parse_config(text);
  CHECK(c.preset == model::Preset::kCrossStitch);
  CHECK(c.lr == 0.2);
  CHECK(c.seed == 42);
  CHECK(c.lambdas.at("POS") == 0.25);
  CHECK(c.tasks.size() == 2);
  CHECK(c.tasks[1].column == 1);
  CHECK(c.subspaces == 4);
  CHECK(c.ablation.alpha == model::AlphaMode::kConstant);
  CHECK_FALSE(c.ablation.subspaces);
  CHECK(c.ablation.mixing == model::Mixing::kSkip);
  CHECK(c.extra_tests.at("ood") == "d.conll");
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("empty config text yields the defaults") {
  CHECK(parse_config("") == TrainConfig{});
  const TrainConfig d;
  CHECK(d.lr == 0.1);
  CHECK(d.lr_decay == 0.05);
  CHECK(d.patience == 2);
  CHECK(d.batch_size == 1);
  CHECK(d.gamma == 0.01);
}

TEST_CASE("bad config values name the offending key") {
  try {
    parse_config("lr = abc\n");
    FAIL("expected a usage error");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("lr") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("preset = deep\n"), UsageError);
  CHECK_THROWS_AS(parse_config("mixing = blend\n"), UsageError);
  CHECK_THROWS_AS(parse_config("patience = -1\n"), UsageError);
  CHECK_THROWS_AS(load_config("/nonexistent/sluice.cfg"), IoError);
}

TEST_CASE("per-task paths override the shared ones") {
  TrainConfig c = parse_config("train = all.conll\ntrain.POS = pos.conll\n");
  CHECK(c.path_for("train", "POS") == "pos.conll");
  CHECK(c.path_for("train", "CHUNK") == "all.conll");
  CHECK(c.path_for("test", "CHUNK").empty());
}

TEST_CASE("load_config resolves paths against the file's directory") {
  const auto dir = scratch_dir("cfg");
  {
    std::ofstream out(dir / "run.cfg");
    out << "train = data/train.conll\ndev = /abs/dev.conll\n";
  }
  const TrainConfig c = load_config((dir / "run.cfg").string());
  CHECK(c.train == (dir / "data/train.conll").string());
  CHECK(c.dev == "/abs/dev.conll");
}

TEST_CASE("inverse-time learning-rate decay") {
  TrainConfig c;
  CHECK(lr_schedule(0, c) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(lr_schedule(20, c) == doctest::Approx(0.05).epsilon(1e-15));
  c.lr_decay = 0.0;
  for (std::size_t e : {0, 1, 5, 50}) CHECK(lr_schedule(e, c) == 0.1);
}

TEST_CASE("early stopping follows the patience rule") {
  EarlyStop s = early_stop_check({0.5, 0.6, 0.59, 0.58}, 2);
  CHECK(s.stop);
  CHECK(s.best_epoch == 2);
  s = early_stop_check({0.5, 0.6, 0.7}, 2);
  CHECK_FALSE(s.stop);
  CHECK(s.best_epoch == 3);
  s = early_stop_check({0.5, 0.5, 0.5}, 2);
  CHECK(s.stop);
  CHECK(s.best_epoch == 1);
  s = early_stop_check({0.5, 0.4}, 2);
  CHECK_FALSE(s.stop);
}

TEST_CASE("argmax breaks ties toward the lowest label") {
  const std::vector<double> a = {0.1, 0.7, 0.7, 0.2};
  CHECK(argmax(a) == 1);
  const std::vector<double> b = {3.0, 3.0};
  CHECK(argmax(b) == 0);
}

TEST_CASE("evaluate_accuracy matches an explicit prediction loop") {
  TrainingData data = tiny_data();
  auto m = build_model(tiny_config(), data);
  for (std::size_t task = 0; task < 2; ++task) {
    const EncodedSplit& dev = data.split(task, "dev");
    std::size_t right = 0, total = 0;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      diff::Tape tape;
      std::vector<bool> heads(2, false);
      heads[task] = true;
      auto r = model::forward_all_tasks(tape, *m, dev.sentences[i], heads);
      for (std::size_t t = 0; t < dev.tags[i].size(); ++t) {
        const auto logits = tape.values(r.logits[task][t]);
        std::size_t best = 0;
        for (std::size_t l = 1; l < logits.size(); ++l) {
          if (logits[l] > logits[best]) best = l;
        }
        right += best == dev.tags[i][t];
        ++total;
      }
    }
    CHECK(evaluate_accuracy(*m, dev, task) ==
          static_cast<double>(right) / static_cast<double>(total));
  }
  CHECK_THROWS_AS(evaluate_accuracy(*m, EncodedSplit{}, 0), InputError);
}

TEST_CASE("a zero learning rate leaves the model untouched") {
  TrainingData data = tiny_data();
  auto m = build_model(tiny_config(), data);
  const auto before = parameter_values(*m);
  const double dev_before = evaluate_accuracy(*m, data.split(0, "dev"), 0);
  diff::Rng rng(3);
  const EpochStats stats = train_epoch(*m, data, rng, 1, 0.0);
  CHECK(parameter_values(*m) == before);
  CHECK(evaluate_accuracy(*m, data.split(0, "dev"), 0) == dev_before);
  CHECK(stats.batches[0] == 24);
  CHECK(stats.batches[1] == 24);
}

TEST_CASE("training loss falls on a ten-sentence single task") {
  data::ToySplits s;
  s.train = 10;
  s.dev = 4;
  s.test = 0;
  s.ood = 0;
  std::vector<data::Corpus> corpora;
  corpora.push_back(data::toy_corpus("POS", data::kToyPos, 9, s));
  TrainingData data = prepare_data(std::move(corpora), 0, 1);
  TrainConfig c = tiny_config();
  c.tasks = {{"POS", data::kToyPos}};
  c.preset = model::Preset::kSingleTask;
  auto m = build_model(c, data);
  diff::Rng rng(4);
  std::vector<double> losses;
  for (std::size_t e = 0; e < 5; ++e) {
    losses.push_back(train_epoch(*m, data, rng, 1, 0.1).train_loss[0]);
  }
  std::size_t rises = 0;
  for (std::size_t e = 1; e < losses.size(); ++e) rises += losses[e] > losses[e - 1];
  CHECK(rises <= 1);
  CHECK(losses.back() < losses.front());
}

TEST_CASE("identical configs produce identical metrics") {
  TrainingData data = tiny_data();
  TrainConfig c = tiny_config();
  c.max_epochs = 3;
  const TrainingResult a = run_training(c, data);
  const TrainingResult b = run_training(c, data);
  CHECK(metrics_json(a.metrics) == metrics_json(b.metrics));
  CHECK(metrics_json(a.metrics).find("seconds") == std::string::npos);
  CHECK(timing_json(a.metrics).find("seconds") != std::string::npos);
}

TEST_CASE("the restored snapshot achieves the best recorded dev accuracy") {
  TrainingData data = tiny_data();
  TrainConfig c = tiny_config();
  c.max_epochs = 5;
  c.patience = 1;
  const TrainingResult r = run_training(c, data);
  double best = -1.0;
  for (const auto& e : r.metrics.epochs) best = std::max(best, e.dev_accuracy[0]);
  const auto& rec = r.metrics.epochs.at(r.metrics.best_epoch - 1);
  CHECK(rec.dev_accuracy[0] == best);
  CHECK(r.metrics.final_accuracy.at("CHUNK").at("dev") == best);
  CHECK(r.metrics.final_accuracy.at("CHUNK").count("test") == 1);
  CHECK(r.metrics.final_accuracy.at("CHUNK").count("train") == 0);
}

TEST_CASE("hard sharing and sluice runs differ only in sharing trainability") {
  TrainingData data = tiny_data();
  TrainConfig a = tiny_config();
  TrainConfig b = a;
  b.preset = model::Preset::kHardSharing;
  auto ma = build_model(a, data);
  auto mb = build_model(b, data);
  auto pa = ma->parameters();
  auto pb = mb->parameters();
  REQUIRE(pa.size() == pb.size());
  const auto sharing = ma->sharing_parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const bool is_sharing =
        std::find(sharing.begin(), sharing.end(), pa[i]) != sharing.end();
    if (is_sharing) continue;
    CHECK(pa[i]->name() == pb[i]->name());
    CHECK(pa[i]->value().values().size() == pb[i]->value().values().size());
    CHECK(std::equal(pa[i]->value().values().begin(), pa[i]->value().values().end(),
                     pb[i]->value().values().begin()));
    CHECK(frozen_count(*pa[i]) == frozen_count(*pb[i]));
  }
  for (auto* p : mb->sharing_parameters()) {
    CHECK(frozen_count(*p) == p->value().size());
  }
}

TEST_CASE("constant alpha receives no gradient during training") {
  TrainingData data = tiny_data();
  TrainConfig c = tiny_config();
  c.ablation.alpha = model::AlphaMode::kConstant;
  c.ablation.subspaces = false;
  auto m = build_model(c, data);
  diff::Rng rng(6);
  CHECK(train_epoch(*m, data, rng, 1, 0.1).alpha_grad_norm == 0.0);
}

TEST_CASE("training data loads from files and requires train and dev") {
  const auto dir = scratch_dir("files");
  data::write_toy_files(dir.string(), 2, tiny_splits());
  TrainConfig c = tiny_config();
  c.train = (dir / "train.conll").string();
  c.dev = (dir / "dev.conll").string();
  c.test = (dir / "test.conll").string();
  c.extra_tests["ood"] = (dir / "ood.conll").string();
  TrainingData data = load_training_data(c);
  CHECK(data.corpora.size() == 2);
  CHECK(data.split(0, "train").size() == 24);
  CHECK(data.split(1, "ood").size() == 8);
  c.dev.clear();
  CHECK_THROWS_AS(load_training_data(c), UsageError);
}
