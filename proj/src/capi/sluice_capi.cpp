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


#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "data/toy.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "sluice/sluice.h"
#include "train/artifacts.hpp"
#include "train/commands.hpp"
#include "train/config.hpp"

struct sluice_config {
  sluice::train::TrainConfig value;
};

struct sluice_model {
  sluice::train::LoadedModel value;
};

namespace {

thread_local std::string g_last_error;

sluice_status fail(sluice_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body` and converts any exception into a status code.
template <typename Body>
sluice_status guarded(Body&& body) {
  g_last_error.clear();
  try {
    body();
    return SLUICE_OK;
  } catch (const sluice::UsageError& e) {
    return fail(SLUICE_ERR_USAGE, e.what());
  } catch (const sluice::ConfigError& e) {
    return fail(SLUICE_ERR_USAGE, e.what());
  } catch (const sluice::InputError& e) {
    return fail(SLUICE_ERR_INPUT, e.what());
  } catch (const sluice::LabelError& e) {
    return fail(SLUICE_ERR_INPUT, e.what());
  } catch (const sluice::ParseError& e) {
    return fail(SLUICE_ERR_PARSE, e.what());
  } catch (const sluice::IoError& e) {
    return fail(SLUICE_ERR_IO, e.what());
  } catch (const sluice::NumericError& e) {
    return fail(SLUICE_ERR_NUMERIC, e.what());
  } catch (const sluice::ContractError& e) {
    return fail(SLUICE_ERR_MODEL, e.what());
  } catch (const sluice::DimensionError& e) {
    return fail(SLUICE_ERR_MODEL, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SLUICE_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SLUICE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SLUICE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SLUICE_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw sluice::UsageError(std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sluice::train::LogFn wrap_log(sluice_log_fn log, void* user) {
  if (log == nullptr) return {};
  return [log, user](const std::string& line) { log(line.c_str(), user); };
}

std::string dir_arg(const char* dir) {
  require(dir, "out_dir");
  if (*dir == '\0') throw sluice::UsageError("out_dir must not be empty");
  return dir;
}

std::size_t task_arg(const sluice::train::LoadedModel& m, const char* task) {
  return task == nullptr ? m.main_task : m.task_index(task);
}

}  // namespace

extern "C" {

const char* sluice_version(void) { return sluice::train::tool_version(); }

const char* sluice_status_name(sluice_status status) {
  switch (status) {
    case SLUICE_OK: return "ok";
    case SLUICE_ERR_USAGE: return "usage error";
    case SLUICE_ERR_INPUT: return "input error";
    case SLUICE_ERR_PARSE: return "parse error";
    case SLUICE_ERR_IO: return "i/o error";
    case SLUICE_ERR_NUMERIC: return "numeric error";
    case SLUICE_ERR_MODEL: return "model error";
    case SLUICE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sluice_last_error(void) { return g_last_error.c_str(); }

void sluice_string_free(char* s) { std::free(s); }

sluice_status sluice_config_new(sluice_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sluice_config{};
  });
}

sluice_status sluice_config_load(const char* path, sluice_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sluice_config{sluice::train::load_config(path)};
  });
}

void sluice_config_free(sluice_config* config) { delete config; }

sluice_status sluice_config_set(sluice_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    sluice::train::set_key(config->value, key, value);
  });
}

sluice_status sluice_config_serialize(const sluice_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = copy_string(sluice::train::serialize_config(config->value));
  });
}

sluice_status sluice_config_keys(char** out) {
  return guarded([&] {
    require(out, "out");
    std::string text;
    for (const auto& k : sluice::train::config_keys()) text += k + "\n";
    *out = copy_string(text);
  });
}

sluice_status sluice_train(const sluice_config* config, const char* out_dir,
                           sluice_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    sluice::train::train_to_directory(config->value, dir_arg(out_dir), wrap_log(log, user));
  });
}

sluice_status sluice_run_manifest(const char* manifest_path, const char* out_dir,
                                  sluice_log_fn log, void* user) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    sluice::train::replay_manifest(manifest_path, out_dir == nullptr ? "" : out_dir,
                                   wrap_log(log, user));
  });
}

sluice_status sluice_model_load(const char* snapshot_path, sluice_model** out) {
  return guarded([&] {
    require(snapshot_path, "snapshot_path");
    require(out, "out");
    *out = new sluice_model{sluice::train::load_snapshot(snapshot_path)};
  });
}

void sluice_model_free(sluice_model* model) { delete model; }

size_t sluice_model_task_count(const sluice_model* model) {
  return model == nullptr ? 0 : model->value.tasks.size();
}

const char* sluice_model_task_name(const sluice_model* model, size_t index) {
  if (model == nullptr || index >= model->value.tasks.size()) return nullptr;
  return model->value.tasks[index].name.c_str();
}

sluice_status sluice_model_eval(sluice_model* model, const char* task, const char* corpus_path,
                                double* accuracy) {
  return guarded([&] {
    require(model, "model");
    require(corpus_path, "corpus_path");
    require(accuracy, "accuracy");
    *accuracy = sluice::train::evaluate_file(model->value, task_arg(model->value, task),
                                             corpus_path);
  });
}

sluice_status sluice_model_eval_json(sluice_model* model, const char* task,
                                     const char* corpus_path, char** out) {
  return guarded([&] {
    require(model, "model");
    require(corpus_path, "corpus_path");
    require(out, "out");
    nlohmann::ordered_json j;
    j["corpus"] = corpus_path;
    j["accuracy"] = nlohmann::ordered_json::object();
    auto& loaded = model->value;
    for (std::size_t t = 0; t < loaded.tasks.size(); ++t) {
      if (task != nullptr && t != loaded.task_index(task)) continue;
      j["accuracy"][loaded.tasks[t].name] = sluice::train::evaluate_file(loaded, t, corpus_path);
    }
    *out = copy_string(j.dump(2));
  });
}

sluice_status sluice_synthetic(const sluice_config* config, const char* mode,
                               const size_t* sweep, size_t sweep_len, size_t seeds,
                               size_t epochs, const char* out_dir, sluice_log_fn log,
                               void* user) {
  return guarded([&] {
    require(config, "config");
    require(mode, "mode");
    require(sweep, "sweep");
    const auto m = sluice::train::parse_aux_mode(mode);
    if (!m) throw sluice::UsageError(std::string("unknown mode '") + mode + "' (random|copy)");
    if (seeds == 0) throw sluice::UsageError("seeds must be >= 1");
    if (epochs == 0) throw sluice::UsageError("epochs must be >= 1");
    sluice::train::SyntheticSettings s;
    s.sweep.assign(sweep, sweep + sweep_len);
    s.seeds = seeds;
    s.epochs = epochs;
    sluice::train::synthetic_to_directory(config->value, *m, s, dir_arg(out_dir),
                                          wrap_log(log, user));
  });
}

sluice_status sluice_noise(const sluice_config* config, size_t seeds, size_t max_epochs,
                           const char* out_dir, sluice_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    if (seeds == 0) throw sluice::UsageError("seeds must be >= 1");
    if (max_epochs == 0) throw sluice::UsageError("max_epochs must be >= 1");
    sluice::train::NoiseSettings s;
    s.seeds = seeds;
    s.max_epochs = max_epochs;
    sluice::train::noise_to_directory(config->value, s, dir_arg(out_dir), wrap_log(log, user));
  });
}

sluice_status sluice_ablate(const sluice_config* config, size_t jobs, const char* out_dir,
                            sluice_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    sluice::train::ablation_to_directory(config->value, jobs, dir_arg(out_dir),
                                         wrap_log(log, user));
  });
}

sluice_status sluice_write_toy(const char* dir, uint64_t seed) {
  return guarded([&] {
    const std::string d = dir_arg(dir);
    std::filesystem::create_directories(d);
    sluice::data::write_toy_files(d, seed);
  });
}

}  // extern "C"
