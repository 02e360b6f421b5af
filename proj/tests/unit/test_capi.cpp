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


// The shared-library surface and the command-line tool. Links only the C API.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sluice/sluice.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sluice_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Tiny two-task config over a freshly written toy corpus.
sluice_config* tiny_config(const fs::path& data) {
  REQUIRE(sluice_write_toy(data.c_str(), 3) == SLUICE_OK);
  sluice_config* c = nullptr;
  REQUIRE(sluice_config_new(&c) == SLUICE_OK);
  const std::pair<const char*, std::string> sets[] = {
      {"tasks", "CHUNK:2,POS:1"},
      {"train", (data / "train.conll").string()},
      {"dev", (data / "dev.conll").string()},
      {"test", (data / "test.conll").string()},
      {"layers", "1"},
      {"hidden", "4"},
      {"word_dim", "4"},
      {"char_dim", "3"},
      {"char_hidden", "2"},
      {"mlp_hidden", "4"},
      {"max_epochs", "2"},
  };
  for (const auto& [k, v] : sets) REQUIRE(sluice_config_set(c, k, v.c_str()) == SLUICE_OK);
  return c;
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + SLUICE_CLI + "\" " + args + " > \"" +
                          out.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("status names and config errors") {
  CHECK(std::string(sluice_status_name(SLUICE_OK)) == "ok");
  CHECK(std::string(sluice_version()).size() > 0);

  sluice_config* c = nullptr;
  CHECK(sluice_config_load("/nonexistent/sluice.cfg", &c) != SLUICE_OK);
  CHECK(c == nullptr);
  CHECK(std::string(sluice_last_error()).find("/nonexistent/sluice.cfg") != std::string::npos);

  REQUIRE(sluice_config_new(&c) == SLUICE_OK);
  CHECK(sluice_config_set(c, "no_such_key", "1") == SLUICE_ERR_USAGE);
  CHECK(std::string(sluice_last_error()).find("no_such_key") != std::string::npos);
  CHECK(sluice_config_set(c, "lr", "fast") == SLUICE_ERR_USAGE);
  CHECK(sluice_config_set(c, "lr", "0.25") == SLUICE_OK);
  char* text = nullptr;
  REQUIRE(sluice_config_serialize(c, &text) == SLUICE_OK);
  CHECK(std::string(text).find("lr=0.25\n") != std::string::npos);
  sluice_string_free(text);
  REQUIRE(sluice_config_keys(&text) == SLUICE_OK);
  CHECK(std::string(text).find("subspace_count\n") != std::string::npos);
  sluice_string_free(text);
  sluice_config_free(c);
  CHECK(sluice_config_new(nullptr) == SLUICE_ERR_USAGE);
}

TEST_CASE("train, load and evaluate through the C API") {
  const auto dir = scratch_dir("train");
  sluice_config* c = tiny_config(dir / "data");
  int lines = 0;
  auto count = [](const char*, void* user) { ++*static_cast<int*>(user); };
  REQUIRE(sluice_train(c, (dir / "run").c_str(), count, &lines) == SLUICE_OK);
  CHECK(lines >= 2);
  for (const char* f : {"manifest.json", "metrics.json", "timing.json", "alpha.csv", "beta.csv",
                        "model.snapshot"}) {
    CHECK(fs::exists(dir / "run" / f));
  }

  sluice_model* m = nullptr;
  REQUIRE(sluice_model_load((dir / "run" / "model.snapshot").c_str(), &m) == SLUICE_OK);
  CHECK(sluice_model_task_count(m) == 2);
  CHECK(std::string(sluice_model_task_name(m, 0)) == "CHUNK");
  CHECK(sluice_model_task_name(m, 2) == nullptr);
  double acc = -1.0;
  REQUIRE(sluice_model_eval(m, nullptr, (dir / "data" / "dev.conll").c_str(), &acc) == SLUICE_OK);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  const auto metrics = nlohmann::json::parse(slurp(dir / "run" / "metrics.json"));
  CHECK(acc == doctest::Approx(metrics["final_accuracy"]["CHUNK"]["dev"].get<double>()));

  char* json = nullptr;
  REQUIRE(sluice_model_eval_json(m, nullptr, (dir / "data" / "dev.conll").c_str(), &json) == SLUICE_OK);
  const auto j = nlohmann::json::parse(json);
  sluice_string_free(json);
  CHECK(j["accuracy"].size() == 2);
  CHECK(j["accuracy"]["CHUNK"].get<double>() == acc);
  CHECK(sluice_model_eval(m, "NER", (dir / "data" / "dev.conll").c_str(), &acc) == SLUICE_ERR_USAGE);
  CHECK(sluice_model_eval(m, nullptr, (dir / "missing.conll").c_str(), &acc) != SLUICE_OK);
  CHECK(std::string(sluice_last_error()).find("missing.conll") != std::string::npos);
  sluice_model_free(m);

  CHECK(sluice_run_manifest((dir / "run" / "manifest.json").c_str(), (dir / "again").c_str(),
                            nullptr, nullptr) == SLUICE_OK);
  CHECK(slurp(dir / "run" / "metrics.json") == slurp(dir / "again" / "metrics.json"));
  CHECK(sluice_ablate(c, 0, (dir / "ablate").c_str(), nullptr, nullptr) == SLUICE_ERR_USAGE);
  sluice_config_free(c);
}

TEST_CASE("experiment outputs have the documented shape") {
  const auto dir = scratch_dir("experiments");
  sluice_config* c = tiny_config(dir / "data");
  const size_t sweep[] = {20, 40};
  REQUIRE(sluice_synthetic(c, "copy", sweep, 2, 2, 1, (dir / "syn").c_str(), nullptr, nullptr) ==
          SLUICE_OK);
  std::istringstream syn(slurp(dir / "syn" / "synthetic.csv"));
  std::string line;
  std::getline(syn, line);
  CHECK(line == "mode,n,median_ratio,ratio_seed_1,ratio_seed_2");
  int rows = 0;
  while (std::getline(syn, line)) rows += line.rfind("copy,", 0) == 0;
  CHECK(rows == 2);
  CHECK(sluice_synthetic(c, "mirror", sweep, 2, 2, 1, (dir / "bad").c_str(), nullptr, nullptr) ==
        SLUICE_ERR_USAGE);

  REQUIRE(sluice_noise(c, 1, 2, (dir / "noise").c_str(), nullptr, nullptr) == SLUICE_OK);
  const auto summary = nlohmann::json::parse(slurp(dir / "noise" / "noise_summary.json"));
  CHECK(summary.contains("plateau_rule"));
  CHECK(slurp(dir / "noise" / "noise_curves.csv").rfind("architecture,seed,epoch,train_accuracy\n", 0) == 0);
  sluice_config_free(c);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch_dir("cli");
  CHECK(run_cli("keys", dir / "keys.txt") == 0);
  CHECK(slurp(dir / "keys.txt").find("main_task") != std::string::npos);
  CHECK(run_cli("", dir / "none.txt") == 2);
  CHECK(run_cli("train --out x --bogus", dir / "bogus.txt") == 2);
  CHECK(run_cli("train --config /nonexistent/x.cfg --out " + (dir / "o").string(), dir / "missing.txt") == 1);
  CHECK(slurp(dir / "missing.txt").find("/nonexistent/x.cfg") != std::string::npos);
  CHECK(run_cli("toy --out " + (dir / "toy").string(), dir / "toy.txt") == 0);
  CHECK(fs::exists(dir / "toy" / "ood.conll"));
  CHECK(run_cli("train --config " + (dir / "toy" / "train.conll").string() + " --out " +
                    (dir / "o").string(),
                dir / "garbage.txt") != 0);
  CHECK(run_cli("train --set lr=fast --config /dev/null --out " + (dir / "o").string(),
                dir / "usage.txt") == 2);
}
