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
#include <sstream>
#include <string>
#include <vector>

#include "data/corpus.hpp"
#include "data/toy.hpp"
#include "diff/rng.hpp"
#include "doctest.h"
#include "errors.hpp"

using namespace sluice;
using namespace sluice::data;

namespace {

const char* kAnnotated =
    "Abramov NNP O B-PER B-A0\n"
    "had VBD B-VP O B-V\n"
    "a DT B-NP O B-A1\n"
    "car NN I-NP O I-A1\n"
    "accident NN I-NP O I-A1\n";

std::vector<std::string> tag_names(const TaggedSentence& s,
                                   const LabelInventory& labels) {
  std::vector<std::string> out;
  for (auto t : s.tags) out.push_back(labels.label(t));
  return out;
}

Corpus corpus_from(const std::string& train, const std::string& dev = "") {
  Corpus c;
  c.task.name = "T";
  c.train = parse_conll(train, 1, c.task.labels);
  c.dev = parse_conll(dev, 1, c.task.labels);
  return c;
}

}  // namespace

TEST_CASE("parse_conll reads the requested tag column") {
  LabelInventory pos;
  auto s = parse_conll(kAnnotated, 1, pos);
  REQUIRE(s.size() == 1);
  CHECK(s[0].tokens ==
        std::vector<std::string>{"Abramov", "had", "a", "car", "accident"});
  CHECK(tag_names(s[0], pos) ==
        std::vector<std::string>{"NNP", "VBD", "DT", "NN", "NN"});

  LabelInventory chunk;
  auto c = parse_conll(kAnnotated, 2, chunk);
  CHECK(tag_names(c[0], chunk) ==
        std::vector<std::string>{"O", "B-VP", "B-NP", "I-NP", "I-NP"});
  CHECK(chunk.labels() == std::vector<std::string>{"O", "B-VP", "B-NP", "I-NP"});
}

TEST_CASE("parse_conll edge inputs") {
  LabelInventory labels;
  CHECK(parse_conll("\n", 1, labels).empty());
  CHECK(parse_conll("", 1, labels).empty());

  SUBCASE("tabs, comments, CR line ends and several blank lines") {
    auto s = parse_conll("# header\nx\tA\r\ny\tB\n\n\n\nz   A\n", 1, labels);
    REQUIRE(s.size() == 2);
    CHECK(s[0].tokens == std::vector<std::string>{"x", "y"});
    CHECK(s[1].tokens == std::vector<std::string>{"z"});
    CHECK(s[1].tags == std::vector<std::uint32_t>{0});
  }
  SUBCASE("short line reports its line number") {
    try {
      parse_conll("a X\nb Y\nc\n", 1, labels);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("missing file names the path") {
    try {
      load_conll("/nonexistent/train.conll", 1, labels);
      FAIL("expected an io error");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("/nonexistent/train.conll") !=
            std::string::npos);
    }
  }
}

TEST_CASE("serialize then parse is the identity") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Corpus c = toy_corpus("POS", kToyPos, seed);
    std::ostringstream out;
    write_conll(out, c.train, c.task.labels);
    LabelInventory again = c.task.labels;
    auto parsed = parse_conll(out.str(), 1, again);
    CHECK(parsed == c.train);
    CHECK(again.labels() == c.task.labels.labels());
  }
}

TEST_CASE("build_vocab uses train tokens only") {
  SUBCASE("min_count 1 on three distinct tokens") {
    Corpus c = corpus_from("a X\nb X\n\na X\nc X\n");
    auto v = build_vocab({&c}, 1);
    CHECK(v.word_count() == 4);
    CHECK(v.word_id("a") == 1);
    CHECK(v.word_id("b") == 2);
    CHECK(v.word_id("c") == 3);
  }
  SUBCASE("min_count above every frequency maps everything to unk") {
    Corpus c = corpus_from("a X\nb X\n\na X\n");
    auto v = build_vocab({&c}, 3);
    CHECK(v.word_count() == 1);
    CHECK(v.word_id("a") == encoder::Vocabulary::kUnk);
  }
  SUBCASE("dev-only tokens are absent") {
    Corpus c = corpus_from("a X\n", "zebra X\n");
    auto v = build_vocab({&c}, 1);
    CHECK(v.word_id("zebra") == encoder::Vocabulary::kUnk);
    CHECK(v.char_id("z") == encoder::Vocabulary::kUnk);
  }
}

TEST_CASE("random relabeling") {
  SUBCASE("a single label leaves the corpus unchanged") {
    Corpus c = corpus_from("a X\nb X\n\nc X\n");
    diff::Rng rng(3);
    Corpus r = make_random_relabel(c, rng);
    CHECK(r.train == c.train);
  }
  SUBCASE("tokens kept, agreement follows the binomial") {
    Corpus c = toy_corpus("POS", kToyPos, 11);
    diff::Rng rng(5);
    Corpus r = make_random_relabel(c, rng);
    REQUIRE(r.train.size() == c.train.size());
    std::size_t n = 0, agree = 0;
    for (std::size_t i = 0; i < c.train.size(); ++i) {
      CHECK(r.train[i].tokens == c.train[i].tokens);
      REQUIRE(r.train[i].tags.size() == c.train[i].tags.size());
      for (std::size_t t = 0; t < c.train[i].tags.size(); ++t) {
        ++n;
        agree += r.train[i].tags[t] == c.train[i].tags[t];
        CHECK(r.train[i].tags[t] < c.task.labels.size());
      }
    }
    const double p = 1.0 / static_cast<double>(c.task.labels.size());
    const double mean = p * static_cast<double>(n);
    const double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
    CHECK(std::abs(static_cast<double>(agree) - mean) <= 3 * sd);
  }
}

TEST_CASE("copy auxiliary") {
  Corpus c = toy_corpus("CHUNK", kToyChunk, 2);
  Corpus copy = make_copy_aux(c);
  CHECK(copy.train == c.train);
  CHECK(copy.task.name != c.task.name);
  const auto before = c.train[0];
  copy.train[0].tags[0] = (copy.train[0].tags[0] + 1) % c.task.labels.size();
  CHECK(c.train[0] == before);

  Corpus empty;
  CHECK(make_copy_aux(empty).train.empty());
}

TEST_CASE("noise corpus") {
  ToySplits big{300, 10, 10, 10};
  Corpus chunk = toy_corpus("CHUNK", kToyChunk, 7, big);
  Corpus pos = toy_corpus("POS", kToyPos, 8, big);
  diff::Rng rng(1);
  auto noise = make_noise_corpus(chunk, pos, rng);
  CHECK(noise.main.train.size() == 200);
  CHECK(noise.auxiliary.train.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) CHECK(noise.auxiliary.train[i] == pos.train[i]);
  for (std::size_t i = 0; i < 200; ++i) {
    CHECK(noise.main.train[i].tokens == chunk.train[i].tokens);
  }
  CHECK(noise.main.task.is_main);

  ToySplits small{150, 10, 10, 10};
  Corpus few = toy_corpus("CHUNK", kToyChunk, 7, small);
  CHECK_THROWS_AS(make_noise_corpus(few, pos, rng), InputError);
}

TEST_CASE("batch iterator") {
  SUBCASE("two equal tasks are drawn about equally often") {
    BatchIterator it({100000, 100000}, 1, diff::Rng(9));
    std::size_t first = 0;
    for (int i = 0; i < 10000; ++i) first += it.next()->task == 0;
    CHECK(std::abs(first / 10000.0 - 0.5) <= 0.02);
  }
  SUBCASE("same seed, same sequence") {
    BatchIterator a({30, 12}, 4, diff::Rng(2));
    BatchIterator b({30, 12}, 4, diff::Rng(2));
    while (auto x = a.next()) {
      auto y = b.next();
      REQUIRE(y);
      CHECK(x->task == y->task);
      CHECK(x->sentences == y->sentences);
    }
    CHECK_FALSE(b.next());
  }
  SUBCASE("single task is a shuffled pass over its split") {
    BatchIterator it({50}, 3, diff::Rng(4));
    std::vector<std::size_t> seen;
    while (auto b = it.next()) {
      CHECK(b->task == 0);
      CHECK(b->sentences.size() <= 3);
      seen.insert(seen.end(), b->sentences.begin(), b->sentences.end());
    }
    REQUIRE(seen.size() == 50);
    std::vector<std::size_t> sorted = seen;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
    CHECK(seen != sorted);
    it.reset();
    CHECK(it.next());
  }
  CHECK_THROWS_AS(BatchIterator({5}, 0, diff::Rng(1)), UsageError);
}

TEST_CASE("toy corpus") {
  auto a = generate_toy_sentences(20, 42);
  auto b = generate_toy_sentences(20, 42);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tokens == b[i].tokens);
    CHECK(a[i].pos.size() == a[i].tokens.size());
    CHECK(a[i].chunk.size() == a[i].tokens.size());
    CHECK(a[i].ner.size() == a[i].tokens.size());
    CHECK(a[i].srl.size() == a[i].tokens.size());
  }
  Corpus c = toy_corpus("NER", kToyNer, 1);
  CHECK(c.train.size() == 400);
  CHECK(c.dev.size() == 50);
  CHECK(c.test.size() == 50);
  CHECK(c.split("ood").size() == 50);
  CHECK(c.task.labels.size() >= 2);
}
