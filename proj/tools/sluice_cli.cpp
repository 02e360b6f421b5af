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


// Command-line front end. Talks to the library only through sluice.h.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sluice/sluice.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code(sluice_status s) {
  if (s == SLUICE_OK) return kExitOk;
  return s == SLUICE_ERR_USAGE ? kExitUsage : kExitRuntime;
}

int report(sluice_status s) {
  if (s != SLUICE_OK) {
    std::fprintf(stderr, "sluice: %s: %s\n", sluice_status_name(s), sluice_last_error());
  }
  return exit_code(s);
}

void log_line(const char* line, void*) {
  std::fprintf(stderr, "%s\n", line);
  std::fflush(stderr);
}

struct ConfigDeleter {
  void operator()(sluice_config* c) const { sluice_config_free(c); }
};
using ConfigPtr = std::unique_ptr<sluice_config, ConfigDeleter>;

struct ModelDeleter {
  void operator()(sluice_model* m) const { sluice_model_free(m); }
};
using ModelPtr = std::unique_ptr<sluice_model, ModelDeleter>;

// Config file plus overrides. Named flags apply after --set, so they win.
struct ConfigArgs {
  std::string path;
  std::vector<std::string> sets;  // KEY=VALUE
  std::vector<std::pair<std::string, std::string>> named;

  void add_to(CLI::App* app, bool required) {
    auto* opt = app->add_option("--config", path, "Flat key=value config file");
    if (required) opt->required();
    app->add_option("--set", sets, "Override one config key (KEY=VALUE), repeatable");
    for (const char* key : {"preset", "lr", "seed", "gamma", "max_epochs", "layers", "hidden"}) {
      std::string flag = std::string("--") + key;
      for (char& ch : flag) ch = ch == '_' ? '-' : ch;
      app->add_option_function<std::string>(
          flag, [this, key](const std::string& v) { named.emplace_back(key, v); },
          std::string("Override config key '") + key + "'");
    }
  }

  sluice_status build(ConfigPtr& out) const {
    sluice_config* raw = nullptr;
    sluice_status s = path.empty() ? sluice_config_new(&raw) : sluice_config_load(path.c_str(), &raw);
    if (s != SLUICE_OK) return s;
    out.reset(raw);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "sluice: --set expects KEY=VALUE, got '%s'\n", kv.c_str());
        return SLUICE_ERR_USAGE;
      }
      s = sluice_config_set(out.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
      if (s != SLUICE_OK) return s;
    }
    for (const auto& [key, value] : named) {
      s = sluice_config_set(out.get(), key.c_str(), value.c_str());
      if (s != SLUICE_OK) return s;
    }
    return SLUICE_OK;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sluice networks: multi-task sequence tagging with learned sharing"};
  app.set_version_flag("--version", std::string(sluice_version()));
  app.require_subcommand(1);
  int code = kExitOk;

  // train
  ConfigArgs train_cfg;
  std::string train_out;
  std::string train_manifest;
  auto* train = app.add_subcommand("train", "Train one model and write its run directory");
  train_cfg.add_to(train, false);
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_option("--manifest", train_manifest, "Replay a recorded manifest instead of a config")
      ->excludes("--config");
  train->callback([&] {
    if (!train_manifest.empty()) {
      code = report(sluice_run_manifest(train_manifest.c_str(), train_out.c_str(), log_line, nullptr));
      return;
    }
    if (train_cfg.path.empty()) throw CLI::RequiredError("--config or --manifest");
    ConfigPtr cfg;
    sluice_status s = train_cfg.build(cfg);
    if (s == SLUICE_OK) s = sluice_train(cfg.get(), train_out.c_str(), log_line, nullptr);
    code = report(s);
  });

  // replay
  std::string replay_manifest;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Rerun any recorded manifest");
  replay->add_option("manifest", replay_manifest, "manifest.json of an earlier run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Output directory (default: the recorded one)");
  replay->callback([&] {
    code = report(sluice_run_manifest(replay_manifest.c_str(), replay_out.c_str(), log_line, nullptr));
  });

  // eval
  std::string eval_snapshot;
  std::string eval_corpus;
  std::string eval_task;
  auto* eval = app.add_subcommand("eval", "Print per-task accuracy of a snapshot as JSON");
  eval->add_option("--snapshot", eval_snapshot, "model.snapshot of a training run")->required();
  eval->add_option("--corpus", eval_corpus, "CoNLL file to score")->required();
  eval->add_option("--task", eval_task, "Only this task");
  eval->callback([&] {
    sluice_model* raw = nullptr;
    sluice_status s = sluice_model_load(eval_snapshot.c_str(), &raw);
    ModelPtr model(raw);
    char* json = nullptr;
    if (s == SLUICE_OK) {
      s = sluice_model_eval_json(model.get(), eval_task.empty() ? nullptr : eval_task.c_str(),
                                 eval_corpus.c_str(), &json);
    }
    if (s == SLUICE_OK) std::printf("%s\n", json);
    sluice_string_free(json);
    code = report(s);
  });

  // synthetic
  ConfigArgs syn_cfg;
  std::string syn_mode = "random";
  std::vector<std::size_t> syn_sweep = {100, 500, 2000};
  std::size_t syn_seeds = 5;
  std::size_t syn_epochs = 3;
  std::string syn_out;
  auto* synthetic = app.add_subcommand("synthetic", "Random/Copy auxiliary-task sweep");
  syn_cfg.add_to(synthetic, false);
  synthetic->add_option("--mode", syn_mode, "random or copy")
      ->check(CLI::IsMember({"random", "copy"}))
      ->capture_default_str();
  synthetic->add_option("--sweep", syn_sweep, "Comma-separated target sizes")
      ->delimiter(',')
      ->capture_default_str();
  synthetic->add_option("--seeds", syn_seeds, "Seeds per size")->check(CLI::PositiveNumber)->capture_default_str();
  synthetic->add_option("--epochs", syn_epochs, "Fixed epochs per run")->check(CLI::PositiveNumber)->capture_default_str();
  synthetic->add_option("--out", syn_out, "Output directory")->required();
  synthetic->callback([&] {
    ConfigPtr cfg;
    sluice_status s = syn_cfg.build(cfg);
    if (s == SLUICE_OK) {
      s = sluice_synthetic(cfg.get(), syn_mode.c_str(), syn_sweep.data(), syn_sweep.size(),
                           syn_seeds, syn_epochs, syn_out.c_str(), log_line, nullptr);
    }
    code = report(s);
  });

  // noise
  ConfigArgs noise_cfg;
  std::size_t noise_seeds = 5;
  std::size_t noise_epochs = 60;
  std::string noise_out;
  auto* noise = app.add_subcommand("noise", "Learning curves on randomly relabeled data");
  noise_cfg.add_to(noise, false);
  noise->add_option("--seeds", noise_seeds, "Seeds")->check(CLI::PositiveNumber)->capture_default_str();
  noise->add_option("--epochs", noise_epochs, "Epoch cap when no plateau is reached")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  noise->add_option("--out", noise_out, "Output directory")->required();
  noise->callback([&] {
    ConfigPtr cfg;
    sluice_status s = noise_cfg.build(cfg);
    if (s == SLUICE_OK) {
      s = sluice_noise(cfg.get(), noise_seeds, noise_epochs, noise_out.c_str(), log_line, nullptr);
    }
    code = report(s);
  });

  // ablate
  ConfigArgs ablate_cfg;
  std::size_t ablate_jobs = 1;
  std::string ablate_out;
  auto* ablate = app.add_subcommand("ablate", "Run the seven-cell ablation grid");
  ablate_cfg.add_to(ablate, true);
  ablate->add_option("--jobs", ablate_jobs, "Cells trained at once")->check(CLI::PositiveNumber)->capture_default_str();
  ablate->add_option("--out", ablate_out, "Output directory")->required();
  ablate->callback([&] {
    ConfigPtr cfg;
    sluice_status s = ablate_cfg.build(cfg);
    if (s == SLUICE_OK) s = sluice_ablate(cfg.get(), ablate_jobs, ablate_out.c_str(), log_line, nullptr);
    code = report(s);
  });

  // toy
  std::string toy_out;
  std::uint64_t toy_seed = 1;
  auto* toy = app.add_subcommand("toy", "Write the generated toy CoNLL corpus");
  toy->add_option("--out", toy_out, "Output directory")->required();
  toy->add_option("--seed", toy_seed, "Generator seed")->capture_default_str();
  toy->callback([&] { code = report(sluice_write_toy(toy_out.c_str(), toy_seed)); });

  // keys
  auto* keys = app.add_subcommand("keys", "List accepted config keys");
  keys->callback([&] {
    char* text = nullptr;
    const sluice_status s = sluice_config_keys(&text);
    if (s == SLUICE_OK) std::fputs(text, stdout);
    sluice_string_free(text);
    code = report(s);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return code;
}
