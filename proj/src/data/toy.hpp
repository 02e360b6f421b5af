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
#include <ostream>
#include <string>
#include <vector>

#include "data/corpus.hpp"
#include "diff/rng.hpp"

namespace sluice::data {

// A sentence from the synthetic grammar with four aligned annotation layers.
struct ToySentence {
  std::vector<std::string> tokens;
  std::vector<std::string> pos;
  std::vector<std::string> chunk;
  std::vector<std::string> ner;
  std::vector<std::string> srl;
};

// Column order of the multi-column toy files: token POS CHUNK NER SRL.
enum ToyColumn : std::size_t {
  kToyPos = 1,
  kToyChunk = 2,
  kToyNer = 3,
  kToySrl = 4,
};

// `shifted` draws mostly from a disjoint lexicon, giving an out-of-domain
// split with the same label schemas.
std::vector<ToySentence> generate_toy_sentences(std::size_t count,
                                                std::uint64_t seed,
                                                bool shifted = false);

void write_toy_conll(std::ostream& out, const std::vector<ToySentence>& s);

struct ToySplits {
  std::size_t train = 400;
  std::size_t dev = 50;
  std::size_t test = 50;
  std::size_t ood = 50;
};

// In-memory corpus for one annotation layer. Every task built from the same
// (seed, splits) sees the same sentences.
Corpus toy_corpus(const std::string& task_name, ToyColumn column,
                  std::uint64_t seed, const ToySplits& splits = {});

// Writes train.conll, dev.conll, test.conll and ood.conll into `dir`, split
// exactly as toy_corpus splits them. Returns the written paths.
std::vector<std::string> write_toy_files(const std::string& dir,
                                         std::uint64_t seed,
                                         const ToySplits& splits = {});

}  // namespace sluice::data
