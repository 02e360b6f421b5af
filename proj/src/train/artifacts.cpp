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

#include "train/artifacts.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"
#include "model/export.hpp"
#include "model/preset.hpp"

#ifndef SLUICE_VERSION
#define SLUICE_VERSION "0.0.0"
#endif

namespace sluice::train {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* tool_version() { return SLUICE_VERSION; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::vector<std::string> corpus_paths(const TrainConfig& config) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::string& p) {
    if (!p.empty() && seen.insert(p).second) out.push_back(p);
  };
  add(config.train);
  add(config.dev);
  add(config.test);
  for (const auto& [key, path] : config.task_paths) add(path);
  for (const auto& [name, path] : config.extra_tests) add(path);
  return out;
}

namespace {

ordered_json config_object(const TrainConfig& config) {
  ordered_json obj = ordered_json::object();
  std::istringstream lines(serialize_config(config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    // Empty values are the defaults and cannot be set explicitly.
    if (eq == std::string::npos || eq + 1 == line.size()) continue;
    obj[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return obj;
}

TrainConfig config_from_object(const ordered_json& obj) {
  if (!obj.is_object()) throw ParseError("manifest config is not an object", 1);
  TrainConfig c;
  for (const auto& [key, value] : obj.items()) {
    if (!value.is_string()) throw ParseError("manifest config value for '" + key + "' is not a string", 1);
    set_key(c, key, value.get<std::string>());
  }
  return c;
}

}  // namespace

RunManifest make_manifest(const std::string& command, const TrainConfig& config,
                          const std::string& output_dir) {
  RunManifest m;
  m.command = command;
  m.tool_version = tool_version();
  m.config = config;
  m.seed = config.seed;
  m.output_dir = output_dir;
  for (const std::string& p : corpus_paths(config)) {
    if (!fs::exists(p)) throw InputError("corpus file '" + p + "' does not exist");
    CorpusFile f;
    f.path = p;
    f.sha256 = sha256_file(p);
    f.bytes = fs::file_size(p);
    m.corpora.push_back(std::move(f));
  }
  return m;
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["format"] = kManifestFormat;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  j["seed"] = m.seed;
  j["output_dir"] = m.output_dir;
  j["config"] = config_object(m.config);
  j["corpora"] = ordered_json::array();
  for (const auto& f : m.corpora) {
    j["corpora"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  j["settings"] = ordered_json::object();
  for (const auto& [k, v] : m.settings) j["settings"][k] = v;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 1);
  }
  try {
    if (j.at("format").get<int>() != kManifestFormat) {
      throw ParseError("unsupported manifest format " + j.at("format").dump(), 1);
    }
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.output_dir = j.at("output_dir").get<std::string>();
    m.config = config_from_object(j.at("config"));
    for (const auto& f : j.at("corpora")) {
      m.corpora.push_back({f.at("path").get<std::string>(),
                           f.at("sha256").get<std::string>(),
                           f.at("bytes").get<std::uintmax_t>()});
    }
    for (const auto& [k, v] : j.at("settings").items()) m.settings[k] = v.get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what(), 1);
  }
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  write_text_file(path, manifest_json(manifest));
}

RunManifest read_manifest(const std::string& path) {
  return parse_manifest(read_text_file(path));
}

void verify_corpora(const RunManifest& manifest) {
  for (const auto& f : manifest.corpora) {
    if (!fs::exists(f.path)) throw InputError("corpus file '" + f.path + "' does not exist");
    if (sha256_file(f.path) != f.sha256) {
      throw InputError("corpus file '" + f.path + "' changed since the manifest was written");
    }
  }
}

std::size_t LoadedModel::task_index(const std::string& name) const {
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    if (tasks[m].name == name) return m;
  }
  throw UsageError("snapshot has no task named '" + name + "'");
}

void write_snapshot(std::ostream& out, const TrainConfig& config,
                    const TrainingData& data, model::SluiceModel& model) {
  const std::string cfg = serialize_config(config);
  const auto cfg_lines = static_cast<std::size_t>(std::count(cfg.begin(), cfg.end(), '\n'));
  out << "sluice-snapshot " << kSnapshotFormat << "\n";
  out << "config " << cfg_lines << "\n" << cfg;
  out << "main_task " << data.main_task << "\n";
  const auto& words = data.vocab.words();
  out << "words " << words.size() - 1 << "\n";
  for (std::size_t i = 1; i < words.size(); ++i) out << words[i] << "\n";
  const auto& chars = data.vocab.chars();
  out << "chars " << chars.size() - 1 << "\n";
  for (std::size_t i = 1; i < chars.size(); ++i) out << chars[i] << "\n";
  for (const auto& c : data.corpora) {
    out << "task " << c.task.name << " " << c.task.labels.size() << "\n";
    for (const auto& l : c.task.labels.labels()) out << l << "\n";
  }
  char buf[64];
  for (const auto* p : model.parameters()) {
    const auto& s = p->shape();
    out << "param " << p->name() << " " << s.rows << " " << s.cols << "\n";
    const auto v = p->value().values();
    for (std::size_t r = 0; r < s.rows; ++r) {
      for (std::size_t c = 0; c < s.cols; ++c) {
        auto res = std::to_chars(buf, buf + sizeof buf, v[r * s.cols + c],
                                 std::chars_format::hex);
        if (c > 0) out << ' ';
        out.write(buf, res.ptr - buf);
      }
      out << "\n";
    }
  }
  out << "end\n";
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("unexpected end of snapshot", line_ + 1);
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  // "<tag> <fields...>" with the tag checked.
  std::vector<std::string> record(const std::string& tag) {
    std::istringstream ss(next());
    std::vector<std::string> fields;
    std::string f;
    while (ss >> f) fields.push_back(f);
    if (fields.empty() || fields[0] != tag) {
      throw ParseError("expected '" + tag + "' record", line_);
    }
    return fields;
  }

  std::size_t count(const std::string& field) const {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size()) {
      throw ParseError("bad count '" + field + "'", line_);
    }
    return v;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace

LoadedModel read_snapshot(std::istream& in) {
  LineReader r(in);
  auto head = r.record("sluice-snapshot");
  if (head.size() != 2 || r.count(head[1]) != static_cast<std::size_t>(kSnapshotFormat)) {
    throw ParseError("unsupported snapshot format", r.line());
  }
  LoadedModel out;
  auto cfg = r.record("config");
  if (cfg.size() != 2) throw ParseError("malformed config record", r.line());
  std::string text;
  for (std::size_t i = 0, n = r.count(cfg[1]); i < n; ++i) text += r.next() + "\n";
  out.config = parse_config(text);

  auto main = r.record("main_task");
  if (main.size() != 2) throw ParseError("malformed main_task record", r.line());
  out.main_task = r.count(main[1]);

  auto words = r.record("words");
  if (words.size() != 2) throw ParseError("malformed words record", r.line());
  for (std::size_t i = 0, n = r.count(words[1]); i < n; ++i) out.vocab.add_word(r.next());
  auto chars = r.record("chars");
  if (chars.size() != 2) throw ParseError("malformed chars record", r.line());
  for (std::size_t i = 0, n = r.count(chars[1]); i < n; ++i) out.vocab.add_char(r.next());

  for (std::size_t t = 0; t < out.config.tasks.size(); ++t) {
    auto task = r.record("task");
    if (task.size() != 3) throw ParseError("malformed task record", r.line());
    data::TaskSpec spec;
    spec.name = task[1];
    for (std::size_t i = 0, n = r.count(task[2]); i < n; ++i) spec.labels.intern(r.next());
    out.tasks.push_back(std::move(spec));
  }
  if (out.main_task >= out.tasks.size()) throw ParseError("main_task out of range", r.line());
  out.tasks[out.main_task].is_main = true;

  // A label-only TrainingData is enough to rebuild the same architecture.
  TrainingData shell;
  for (const auto& spec : out.tasks) {
    data::Corpus c;
    c.task = spec;
    shell.corpora.push_back(std::move(c));
  }
  shell.main_task = out.main_task;
  shell.vocab = out.vocab;
  out.model = build_model(out.config, shell);

  for (auto* p : out.model->parameters()) {
    auto rec = r.record("param");
    if (rec.size() != 4) throw ParseError("malformed param record", r.line());
    const auto& s = p->shape();
    if (rec[1] != p->name() || r.count(rec[2]) != s.rows || r.count(rec[3]) != s.cols) {
      throw ContractError("snapshot parameter '" + rec[1] + "' " + rec[2] + "x" + rec[3] +
                          " does not match model parameter '" + p->name() + "' " +
                          std::to_string(s.rows) + "x" + std::to_string(s.cols));
    }
    auto values = p->mutable_value().mutable_values();
    for (std::size_t row = 0; row < s.rows; ++row) {
      const std::string line = r.next();
      const char* cur = line.data();
      const char* end = line.data() + line.size();
      for (std::size_t c = 0; c < s.cols; ++c) {
        while (cur < end && *cur == ' ') ++cur;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cur, end, v, std::chars_format::hex);
        if (ec != std::errc()) throw ParseError("bad parameter value", r.line());
        values[row * s.cols + c] = v;
        cur = ptr;
      }
      while (cur < end && *cur == ' ') ++cur;
      if (cur != end) throw ParseError("too many values in parameter row", r.line());
    }
  }
  auto end = r.record("end");
  (void)end;
  return out;
}

LoadedModel load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  return read_snapshot(in);
}

double evaluate_file(LoadedModel& loaded, std::size_t task, const std::string& path) {
  if (task >= loaded.tasks.size()) throw UsageError("task index out of range");
  data::LabelInventory labels = loaded.tasks[task].labels;
  const auto sentences =
      data::load_conll(path, loaded.config.tasks.at(task).column, labels);
  if (sentences.empty()) throw InputError("'" + path + "' holds no sentences");
  return evaluate_accuracy(*loaded.model, encode_split(loaded.vocab, sentences), task);
}

namespace {

std::string format_epoch(const EpochRecord& e, const std::vector<std::string>& tasks) {
  std::ostringstream ss;
  ss << "epoch " << e.epoch << " lr " << model::format_double(e.lr);
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    ss << " " << tasks[m] << " loss " << model::format_double(e.train_loss[m]) << " dev "
       << model::format_double(e.dev_accuracy[m]);
  }
  ss << " orth " << model::format_double(e.orthogonality);
  return ss.str();
}

MetricsRecord train_and_write(const RunManifest& manifest, const std::string& dir,
                              const LogFn& log) {
  fs::create_directories(dir);
  write_manifest(manifest, (fs::path(dir) / RunFiles::kManifest).string());
  const TrainConfig& config = manifest.config;
  TrainingData data = load_training_data(config);
  std::vector<std::string> names;
  for (const auto& c : data.corpora) names.push_back(c.task.name);
  TrainingResult r = run_training(config, data, [&](const EpochRecord& e) {
    if (log) log(format_epoch(e, names));
  });
  write_text_file((fs::path(dir) / RunFiles::kMetrics).string(), metrics_json(r.metrics));
  write_text_file((fs::path(dir) / RunFiles::kTiming).string(), timing_json(r.metrics));
  {
    std::ostringstream a, b;
    model::write_alpha_csv(a, *r.model);
    model::write_beta_csv(b, *r.model);
    write_text_file((fs::path(dir) / RunFiles::kAlpha).string(), a.str());
    write_text_file((fs::path(dir) / RunFiles::kBeta).string(), b.str());
  }
  std::ostringstream snap;
  write_snapshot(snap, config, data, *r.model);
  write_text_file((fs::path(dir) / RunFiles::kSnapshot).string(), snap.str());
  if (log) {
    log("best epoch " + std::to_string(r.metrics.best_epoch) + (r.metrics.stopped_early ? " (early stop)" : ""));
  }
  return r.metrics;
}

}  // namespace

MetricsRecord train_to_directory(const TrainConfig& config, const std::string& output_dir,
                                 const LogFn& log) {
  config.validate();
  return train_and_write(make_manifest("train", config, output_dir), output_dir, log);
}

MetricsRecord train_from_manifest(const std::string& manifest_path,
                                  const std::string& output_dir, const LogFn& log) {
  RunManifest m = read_manifest(manifest_path);
  if (m.command != "train") {
    throw UsageError("manifest was written by '" + m.command + "', not 'train'");
  }
  verify_corpora(m);
  if (!output_dir.empty()) m.output_dir = output_dir;
  return train_and_write(m, m.output_dir, log);
}

}  // namespace sluice::train
