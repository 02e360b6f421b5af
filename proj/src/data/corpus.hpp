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

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diff/rng.hpp"
#include "encoder/vocabulary.hpp"

namespace sluice::data {

// Ordered label set; ids follow first-seen order.
class LabelInventory {
 public:
  LabelInventory() = default;
  explicit LabelInventory(const std::vector<std::string>& labels);

  std::uint32_t intern(const std::string& label);
  std::optional<std::uint32_t> find(const std::string& label) const;
  const std::string& label(std::uint32_t id) const { return labels_.at(id); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct TaskSpec {
  std::string name;
  LabelInventory labels;
  bool is_main = false;
};

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::uint32_t> tags;

  bool operator==(const TaggedSentence&) const = default;
};

using Split = std::vector<TaggedSentence>;

// One task's data. Splits of different tasks need not share sentences.
struct Corpus {
  TaskSpec task;
  Split train;
  Split dev;
  Split test;
  // Additional named evaluation splits (e.g. out-of-domain test sets).
  std::map<std::string, Split> extra;

  // Named split lookup: "train", "dev", "test" or a key of `extra`.
  const Split& split(const std::string& name) const;
};

// Reads whitespace-separated columns (tabs or runs of spaces). Column 0 is
// the token; `column` selects the tag. Blank lines end sentences, lines
// starting with '#' are skipped. New labels are appended to `labels`.
std::vector<TaggedSentence> parse_conll(std::istream& in, std::size_t column,
                                        LabelInventory& labels);
std::vector<TaggedSentence> parse_conll(std::string_view text,
                                        std::size_t column,
                                        LabelInventory& labels);
std::vector<TaggedSentence> load_conll(const std::string& path,
                                       std::size_t column,
                                       LabelInventory& labels);

// Writes "token<TAB>tag" lines, blank line after each sentence.
void write_conll(std::ostream& out, const Split& sentences,
                 const LabelInventory& labels);

// Vocabulary over the train splits only. Words seen fewer than `min_count`
// times map to unk; characters of every train token are kept.
encoder::Vocabulary build_vocab(const std::vector<const Corpus*>& corpora,
                                std::size_t min_count);

// Same tokens; every tag replaced by a uniform draw from the inventory.
Corpus make_random_relabel(const Corpus& corpus, diff::Rng& rng);
// Deep copy under the name "<name>-copy".
Corpus make_copy_aux(const Corpus& corpus);

struct NoiseCorpora {
  Corpus main;       // randomly relabeled chunking sentences
  Corpus auxiliary;  // untouched POS sentences
};
// Takes the first `chunk_sentences` train sentences of `chunk_source`
// (relabeled at random) and the first `pos_sentences` of `pos_source`.
NoiseCorpora make_noise_corpus(const Corpus& chunk_source,
                               const Corpus& pos_source, diff::Rng& rng,
                               std::size_t chunk_sentences = 200,
                               std::size_t pos_sentences = 100);

struct Batch {
  std::size_t task = 0;
  std::vector<std::size_t> sentences;  // indices into the task's train split
};

// Uniform task sampling. Each step draws a task uniformly among those with
// unseen train sentences left this epoch, then takes up to batch_size of its
// remaining sentences in shuffled order. The epoch ends once every task's
// train split is exhausted.
class BatchIterator {
 public:
  BatchIterator(std::vector<std::size_t> train_sizes, std::size_t batch_size,
                diff::Rng rng);

  // Starts a new epoch with fresh shuffles.
  void reset();
  std::optional<Batch> next();

 private:
  std::vector<std::size_t> sizes_;
  std::size_t batch_size_;
  diff::Rng rng_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> cursor_;
};

}  // namespace sluice::data
