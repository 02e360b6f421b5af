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

#include "train/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "model/export.hpp"
#include "model/preset.hpp"

namespace sluice::train {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw UsageError("config key '" + std::string(key) + "': expected " +
                   std::string(expected) + ", got '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a number");
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || end != v.data() + v.size()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

std::size_t to_count(std::string_view key, std::string_view v) {
  const auto n = to_uint(key, v);
  if (n == 0) bad_value(key, v, "a positive integer");
  return static_cast<std::size_t>(n);
}

bool to_switch(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  bad_value(key, v, "on or off");
}

// "a:x,b:y" -> {(a, x), (b, y)}; splits at the first ':' of each item.
std::vector<std::pair<std::string, std::string>> to_pairs(std::string_view key,
                                                          std::string_view v) {
  std::vector<std::pair<std::string, std::string>> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    std::string_view item = trim(v.substr(0, comma));
    v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == item.size()) {
      bad_value(key, item, "name:value items");
    }
    out.emplace_back(std::string(trim(item.substr(0, colon))),
                     std::string(trim(item.substr(colon + 1))));
  }
  return out;
}

std::string join_pairs(const std::vector<std::pair<std::string, std::string>>& items) {
  std::string out;
  for (const auto& [a, b] : items) {
    if (!out.empty()) out += ',';
    out += a + ':' + b;
  }
  return out;
}

using Setter = std::function<void(TrainConfig&, std::string_view key, std::string_view)>;
using Getter = std::function<std::string(const TrainConfig&)>;

struct Key {
  std::string name;
  Setter set;
  Getter get;
};

template <typename T>
Key count_key(std::string name, T TrainConfig::*field) {
  return {name,
          [field](TrainConfig& c, std::string_view k, std::string_view v) {
            c.*field = to_count(k, v);
          },
          [field](const TrainConfig& c) { return std::to_string(c.*field); }};
}

Key path_key(std::string name, std::string TrainConfig::*field) {
  return {name,
          [field](TrainConfig& c, std::string_view, std::string_view v) {
            c.*field = std::string(v);
          },
          [field](const TrainConfig& c) { return c.*field; }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"preset",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         auto p = model::parse_preset(v);
         if (!p) bad_value(k, v, "a preset name");
         c.preset = *p;
       },
       [](const TrainConfig& c) { return std::string(model::preset_name(c.preset)); }},
      {"lr",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         c.lr = to_double(k, v);
         if (c.lr <= 0.0) bad_value(k, v, "a positive number");
       },
       [](const TrainConfig& c) { return model::format_double(c.lr); }},
      {"lr_decay",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         c.lr_decay = to_double(k, v);
         if (c.lr_decay < 0.0) bad_value(k, v, "a non-negative number");
       },
       [](const TrainConfig& c) { return model::format_double(c.lr_decay); }},
      count_key("patience", &TrainConfig::patience),
      count_key("max_epochs", &TrainConfig::max_epochs),
      count_key("batch_size", &TrainConfig::batch_size),
      {"seed",
       [](TrainConfig& c, std::string_view k, std::string_view v) { c.seed = to_uint(k, v); },
       [](const TrainConfig& c) { return std::to_string(c.seed); }},
      {"gamma",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         c.gamma = to_double(k, v);
         if (c.gamma < 0.0) bad_value(k, v, "a non-negative number");
       },
       [](const TrainConfig& c) { return model::format_double(c.gamma); }},
      {"lambda",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         c.lambdas.clear();
         for (auto& [name, value] : to_pairs(k, v)) c.lambdas[name] = to_double(k, value);
       },
       [](const TrainConfig& c) {
         std::vector<std::pair<std::string, std::string>> items;
         for (const auto& [name, value] : c.lambdas) {
           items.emplace_back(name, model::format_double(value));
         }
         return join_pairs(items);
       }},
      {"tasks",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         c.tasks.clear();
         for (auto& [name, column] : to_pairs(k, v)) {
           c.tasks.push_back({name, to_count(k, column)});
         }
       },
       [](const TrainConfig& c) {
         std::vector<std::pair<std::string, std::string>> items;
         for (const auto& t : c.tasks) items.emplace_back(t.name, std::to_string(t.column));
         return join_pairs(items);
       }},
      path_key("main_task", &TrainConfig::main_task),
      path_key("train", &TrainConfig::train),
      path_key("dev", &TrainConfig::dev),
      path_key("test", &TrainConfig::test),
      {"extra_test",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         c.extra_tests.clear();
         for (auto& [name, path] : to_pairs(k, v)) {
           if (name == "train" || name == "dev" || name == "test") {
             bad_value(k, name, "a split name other than train, dev or test");
           }
           c.extra_tests[name] = path;
         }
       },
       [](const TrainConfig& c) {
         return join_pairs({c.extra_tests.begin(), c.extra_tests.end()});
       }},
      count_key("layers", &TrainConfig::layers),
      count_key("hidden", &TrainConfig::hidden),
      count_key("subspace_count", &TrainConfig::subspaces),
      count_key("word_dim", &TrainConfig::word_dim),
      count_key("char_dim", &TrainConfig::char_dim),
      count_key("char_hidden", &TrainConfig::char_hidden),
      count_key("mlp_hidden", &TrainConfig::mlp_hidden),
      count_key("min_count", &TrainConfig::min_count),
      {"alpha",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         auto m = model::parse_alpha_mode(v);
         if (!m) bad_value(k, v, "learned or constant");
         c.ablation.alpha = *m;
       },
       [](const TrainConfig& c) { return std::string(model::alpha_mode_name(c.ablation.alpha)); }},
      {"subspaces",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         c.ablation.subspaces = to_switch(k, v);
       },
       [](const TrainConfig& c) { return std::string(c.ablation.subspaces ? "on" : "off"); }},
      {"mixing",
       [](TrainConfig& c, std::string_view k, std::string_view v) {
         auto m = model::parse_mixing(v);
         if (!m) bad_value(k, v, "mixture, skip or concat");
         c.ablation.mixing = *m;
       },
       [](const TrainConfig& c) { return std::string(model::mixing_name(c.ablation.mixing)); }},
  };
  return table;
}

bool is_split_prefix(std::string_view key, std::string_view& task) {
  for (std::string_view split : {"train.", "dev.", "test."}) {
    if (key.starts_with(split) && key.size() > split.size()) {
      task = key.substr(split.size());
      return true;
    }
  }
  return false;
}

}  // namespace

std::string TrainConfig::path_for(const std::string& split,
                                  const std::string& name) const {
  if (auto it = task_paths.find(split + "." + name); it != task_paths.end()) {
    return it->second;
  }
  if (split == "train") return train;
  if (split == "dev") return dev;
  if (split == "test") return test;
  return {};
}

std::size_t TrainConfig::main_index() const {
  if (main_task.empty()) return 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].name == main_task) return i;
  }
  throw UsageError("config key 'main_task': '" + main_task +
                   "' is not one of the configured tasks");
}

void TrainConfig::validate() const {
  if (tasks.empty()) throw UsageError("config key 'tasks': no tasks configured");
  std::set<std::string> names;
  for (const auto& t : tasks) {
    if (!names.insert(t.name).second) {
      throw UsageError("config key 'tasks': duplicate task '" + t.name + "'");
    }
  }
  main_index();
  for (const auto& [name, value] : lambdas) {
    if (!names.count(name)) {
      throw UsageError("config key 'lambda': unknown task '" + name + "'");
    }
  }
  for (const auto& [key, path] : task_paths) {
    std::string_view task;
    is_split_prefix(key, task);
    if (!names.count(std::string(task))) {
      throw UsageError("config key '" + key + "': unknown task");
    }
  }
  if (hidden % subspaces != 0) {
    throw UsageError("config key 'hidden': " + std::to_string(hidden) +
                     " is not divisible by subspace_count " +
                     std::to_string(subspaces));
  }
}

void set_key(TrainConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  std::string_view task;
  if (is_split_prefix(key, task)) {
    config.task_paths[std::string(key)] = std::string(value);
    return;
  }
  for (const Key& k : keys()) {
    if (k.name == key) {
      k.set(config, key, value);
      return;
    }
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

TrainConfig parse_config(std::string_view text) {
  TrainConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key=value, got '" + std::string(line) + "'");
    }
    set_key(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  TrainConfig config = parse_config(buf.str());
  const auto base = std::filesystem::absolute(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) {
      p = (base / p).lexically_normal().string();
    }
  };
  resolve(config.train);
  resolve(config.dev);
  resolve(config.test);
  for (auto& [key, p] : config.task_paths) resolve(p);
  for (auto& [key, p] : config.extra_tests) resolve(p);
  return config;
}

std::string serialize_config(const TrainConfig& config) {
  std::string out;
  for (const Key& k : keys()) {
    out += k.name + "=" + k.get(config) + "\n";
    if (k.name == "test") {
      for (const auto& [key, path] : config.task_paths) out += key + "=" + path + "\n";
    }
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : keys()) out.push_back(k.name);
  out.push_back("train.NAME");
  out.push_back("dev.NAME");
  out.push_back("test.NAME");
  return out;
}

}  // namespace sluice::train
