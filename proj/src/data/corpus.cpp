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

#include "data/corpus.hpp"

#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace sluice::data {

LabelInventory::LabelInventory(const std::vector<std::string>& labels) {
  for (const auto& l : labels) {
    if (find(l)) throw ConfigError("duplicate label '" + l + "'");
    intern(l);
  }
}

std::uint32_t LabelInventory::intern(const std::string& label) {
  auto [it, inserted] =
      ids_.try_emplace(label, static_cast<std::uint32_t>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<std::uint32_t> LabelInventory::find(
    const std::string& label) const {
  auto it = ids_.find(label);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const Split& Corpus::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "dev") return dev;
  if (name == "test") return test;
  auto it = extra.find(name);
  if (it == extra.end()) {
    throw InputError("task " + task.name + " has no split named '" + name +
                     "'");
  }
  return it->second;
}

namespace {

std::vector<std::string_view> split_columns(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) cols.push_back(line.substr(start, i - start));
  }
  return cols;
}

}  // namespace

std::vector<TaggedSentence> parse_conll(std::istream& in, std::size_t column,
                                        LabelInventory& labels) {
  if (column == 0) throw UsageError("tag column must be >= 1");
  std::vector<TaggedSentence> out;
  TaggedSentence current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) out.push_back(std::move(current));
    current = {};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    const auto cols = split_columns(line);
    if (cols.empty()) {
      flush();
      continue;
    }
    if (cols.size() <= column) {
      throw ParseError("expected at least " + std::to_string(column + 1) +
                           " columns, found " + std::to_string(cols.size()),
                       line_no);
    }
    current.tokens.emplace_back(cols[0]);
    current.tags.push_back(labels.intern(std::string(cols[column])));
  }
  flush();
  return out;
}

std::vector<TaggedSentence> parse_conll(std::string_view text,
                                        std::size_t column,
                                        LabelInventory& labels) {
  std::istringstream in{std::string(text)};
  return parse_conll(in, column, labels);
}

std::vector<TaggedSentence> load_conll(const std::string& path,
                                       std::size_t column,
                                       LabelInventory& labels) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path);
  try {
    return parse_conll(in, column, labels);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void write_conll(std::ostream& out, const Split& sentences,
                 const LabelInventory& labels) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out << s.tokens[i] << '\t' << labels.label(s.tags[i]) << '\n';
    }
    out << '\n';
  }
}

encoder::Vocabulary build_vocab(const std::vector<const Corpus*>& corpora,
                                std::size_t min_count) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  encoder::Vocabulary vocab;
  for (const Corpus* c : corpora) {
    for (const auto& s : c->train) {
      for (const auto& tok : s.tokens) {
        if (counts[tok]++ == 0) order.push_back(tok);
        for (const auto& ch : encoder::utf8_chars(tok)) vocab.add_char(ch);
      }
    }
  }
  for (const auto& tok : order) {
    if (counts[tok] >= min_count) vocab.add_word(tok);
  }
  return vocab;
}

Corpus make_random_relabel(const Corpus& corpus, diff::Rng& rng) {
  Corpus out = corpus;
  out.task.name = corpus.task.name + "-random";
  out.task.is_main = false;
  const std::size_t n_labels = corpus.task.labels.size();
  auto relabel = [&](Split& split) {
    for (auto& s : split) {
      for (auto& tag : s.tags) {
        tag = static_cast<std::uint32_t>(rng.uniform_index(n_labels));
      }
    }
  };
  relabel(out.train);
  relabel(out.dev);
  relabel(out.test);
  for (auto& [name, split] : out.extra) relabel(split);
  return out;
}

Corpus make_copy_aux(const Corpus& corpus) {
  Corpus out = corpus;
  out.task.name = corpus.task.name + "-copy";
  out.task.is_main = false;
  return out;
}

NoiseCorpora make_noise_corpus(const Corpus& chunk_source,
                               const Corpus& pos_source, diff::Rng& rng,
                               std::size_t chunk_sentences,
                               std::size_t pos_sentences) {
  if (chunk_source.train.size() < chunk_sentences) {
    throw InputError("noise corpus needs " + std::to_string(chunk_sentences) +
                     " chunking sentences, source has " +
                     std::to_string(chunk_source.train.size()));
  }
  if (pos_source.train.size() < pos_sentences) {
    throw InputError("noise corpus needs " + std::to_string(pos_sentences) +
                     " POS sentences, source has " +
                     std::to_string(pos_source.train.size()));
  }
  Corpus chunk;
  chunk.task = chunk_source.task;
  chunk.train.assign(chunk_source.train.begin(),
                     chunk_source.train.begin() + chunk_sentences);
  NoiseCorpora out{make_random_relabel(chunk, rng), {}};
  out.main.task.is_main = true;
  out.auxiliary.task = pos_source.task;
  out.auxiliary.task.is_main = false;
  out.auxiliary.train.assign(pos_source.train.begin(),
                             pos_source.train.begin() + pos_sentences);
  return out;
}

BatchIterator::BatchIterator(std::vector<std::size_t> train_sizes,
                             std::size_t batch_size, diff::Rng rng)
    : sizes_(std::move(train_sizes)), batch_size_(batch_size), rng_(rng) {
  if (batch_size_ == 0) throw UsageError("batch_size must be >= 1");
  reset();
}

void BatchIterator::reset() {
  order_.assign(sizes_.size(), {});
  cursor_.assign(sizes_.size(), 0);
  for (std::size_t t = 0; t < sizes_.size(); ++t) {
    order_[t].resize(sizes_[t]);
    for (std::size_t i = 0; i < sizes_[t]; ++i) order_[t][i] = i;
    rng_.shuffle(std::span<std::size_t>(order_[t]));
  }
}

std::optional<Batch> BatchIterator::next() {
  std::vector<std::size_t> open;
  for (std::size_t t = 0; t < sizes_.size(); ++t) {
    if (cursor_[t] < sizes_[t]) open.push_back(t);
  }
  if (open.empty()) return std::nullopt;
  Batch b;
  b.task = open[rng_.uniform_index(open.size())];
  const std::size_t end = std::min(sizes_[b.task], cursor_[b.task] + batch_size_);
  for (std::size_t i = cursor_[b.task]; i < end; ++i) {
    b.sentences.push_back(order_[b.task][i]);
  }
  cursor_[b.task] = end;
  return b;
}

}  // namespace sluice::data
