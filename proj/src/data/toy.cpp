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

#include "data/toy.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <span>

#include "errors.hpp"

namespace sluice::data {

namespace {

// Two lexicons per class: index 0 in-domain, index 1 shifted.
struct Lexicon {
  std::array<std::vector<std::vector<const char*>>, 2> persons;
  std::array<std::vector<std::vector<const char*>>, 2> orgs;
  std::array<std::vector<const char*>, 2> places;
  std::array<std::vector<const char*>, 2> nouns;
  std::array<std::vector<const char*>, 2> plurals;
  std::array<std::vector<const char*>, 2> adjectives;
  std::array<std::vector<const char*>, 2> past_verbs;
  std::array<std::vector<const char*>, 2> present_verbs;
  std::array<std::vector<const char*>, 2> base_verbs;
  std::vector<const char*> determiners;
  std::vector<const char*> prepositions;
  std::vector<const char*> pronouns;
  std::vector<const char*> numbers;
  std::vector<const char*> adverbs;
  std::vector<const char*> modals;
};

const Lexicon& lexicon() {
  static const Lexicon lex = [] {
    Lexicon l;
    l.persons[0] = {{"Abramov"}, {"Maria", "Lopez"}, {"Chen"}, {"John", "Okafor"},
                    {"Patel"}, {"Anna", "Rossi"}, {"Novak"}, {"Tanaka"},
                    {"Lindqvist"}, {"Omar", "Haddad"}};
    l.persons[1] = {{"Kowalski"}, {"Ines", "Duarte"}, {"Mbeki"}, {"Sato"},
                    {"Pierre", "Lambert"}, {"Ivanova"}};
    l.orgs[0] = {{"Acme"}, {"Globex"}, {"Initech"}, {"Reuters"},
                 {"United", "Steel"}, {"Northwind"}};
    l.orgs[1] = {{"Hooli"}, {"Vandelay", "Industries"}, {"Soylent"}, {"Cyberdyne"}};
    l.places[0] = {"Paris", "Lagos", "Oslo", "Texas", "Brazil", "Cairo", "Denver"};
    l.places[1] = {"Lima", "Hanoi", "Perth", "Quebec", "Nairobi"};
    l.nouns[0] = {"car", "accident", "report", "market", "city", "company",
                  "deal", "plan", "bank", "price", "team", "game", "road",
                  "saw", "contract", "budget", "factory", "vote"};
    l.nouns[1] = {"protein", "sample", "reactor", "orbit", "vaccine", "genome",
                  "satellite", "enzyme", "signal"};
    l.plurals[0] = {"cars", "reports", "prices", "workers", "shares", "plans",
                    "games", "roads", "banks", "votes"};
    l.plurals[1] = {"samples", "cells", "proteins", "signals", "orbits",
                    "enzymes"};
    l.adjectives[0] = {"new", "big", "small", "local", "early", "strong",
                       "old", "public"};
    l.adjectives[1] = {"stable", "synthetic", "lunar", "toxic", "rapid"};
    l.past_verbs[0] = {"had", "saw", "bought", "sold", "reported", "signed",
                       "built", "lost", "won", "visited"};
    l.past_verbs[1] = {"measured", "cloned", "launched", "tested", "observed"};
    l.present_verbs[0] = {"has", "sees", "buys", "sells", "reports", "signs",
                          "builds", "plans", "votes"};
    l.present_verbs[1] = {"measures", "clones", "launches", "tests", "observes"};
    l.base_verbs[0] = {"buy", "sell", "report", "sign", "build", "visit", "plan",
                       "vote"};
    l.base_verbs[1] = {"measure", "clone", "launch", "test", "observe"};
    l.determiners = {"a", "the", "the", "this", "every", "some"};
    l.prepositions = {"in", "on", "near", "with", "after", "from"};
    l.pronouns = {"he", "she", "they", "it"};
    l.numbers = {"two", "three", "15", "2008", "several"};
    l.adverbs = {"also", "recently", "quickly", "again"};
    l.modals = {"will", "may", "could"};
    return l;
  }();
  return lex;
}

// Some forms ("saw", "plans", "report") appear both as nouns and as verbs;
// their POS follows their role in the sentence.
const char* verb_pos(bool present) { return present ? "VBZ" : "VBD"; }

class Builder {
 public:
  Builder(diff::Rng& rng, bool shifted) : rng_(rng), shifted_(shifted) {}

  ToySentence build() {
    subject();
    if (rng_.uniform01() < 0.2) adverb();
    verb_phrase();
    object();
    if (rng_.uniform01() < 0.45) prep_phrase();
    push(".", ".", "O", "O", "O");
    return std::move(s_);
  }

 private:
  int domain() { return shifted_ && rng_.uniform01() < 0.85 ? 1 : 0; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[rng_.uniform_index(v.size())];
  }

  void push(const std::string& w, const char* pos, const std::string& chunk,
            const std::string& ner, const std::string& srl) {
    s_.tokens.push_back(w);
    s_.pos.emplace_back(pos);
    s_.chunk.push_back(chunk);
    s_.ner.push_back(ner);
    s_.srl.push_back(srl);
  }

  // Emits a noun phrase; `role` is the SRL span label or "" for none.
  void noun_phrase(const std::string& role, bool allow_pronoun) {
    const double r = rng_.uniform01();
    bool first = true;
    auto tag = [&](const std::string& base) {
      const std::string out = (first ? "B-" : "I-") + base;
      return out;
    };
    auto emit = [&](const std::string& w, const char* pos,
                    const std::string& ner_type) {
      const std::string srl = role.empty() ? "O" : tag(role);
      const std::string ner = ner_type.empty() ? "O" : tag(ner_type);
      push(w, pos, tag("NP"), ner, srl);
      first = false;
    };
    if (allow_pronoun && r < 0.15) {
      emit(pick(lexicon().pronouns), "PRP", "");
    } else if (r < 0.4) {
      for (const char* w : pick(lexicon().persons[domain()])) {
        emit(w, "NNP", "PERSON");
      }
    } else if (r < 0.5) {
      for (const char* w : pick(lexicon().orgs[domain()])) emit(w, "NNP", "ORG");
    } else if (r < 0.6) {
      emit(pick(lexicon().numbers), "CD", "");
      emit(pick(lexicon().plurals[domain()]), "NNS", "");
    } else {
      const bool plural = rng_.uniform01() < 0.25;
      if (!plural) emit(pick(lexicon().determiners), "DT", "");
      if (rng_.uniform01() < 0.4) {
        emit(pick(lexicon().adjectives[domain()]), "JJ", "");
      }
      if (plural) {
        emit(pick(lexicon().plurals[domain()]), "NNS", "");
      } else {
        emit(pick(lexicon().nouns[domain()]), "NN", "");
        if (rng_.uniform01() < 0.25) emit(pick(lexicon().nouns[domain()]), "NN", "");
      }
    }
  }

  void subject() { noun_phrase("ARG0", true); }

  void adverb() {
    push(pick(lexicon().adverbs), "RB", "B-ADVP", "O", "B-ARGM-ADV");
  }

  void verb_phrase() {
    const double r = rng_.uniform01();
    if (r < 0.2) {
      push(pick(lexicon().modals), "MD", "B-VP", "O", "B-ARGM-MOD");
      push(pick(lexicon().base_verbs[domain()]), "VB", "I-VP", "O", "B-V");
    } else {
      const bool present = r < 0.5;
      const auto& verbs = present ? lexicon().present_verbs[domain()]
                                  : lexicon().past_verbs[domain()];
      push(pick(verbs), verb_pos(present), "B-VP", "O", "B-V");
    }
  }

  void object() { noun_phrase("ARG1", false); }

  void prep_phrase() {
    push(pick(lexicon().prepositions), "IN", "B-PP", "O", "B-ARGM-LOC");
    if (rng_.uniform01() < 0.6) {
      push(pick(lexicon().places[domain()]), "NNP", "B-NP", "B-GPE",
           "I-ARGM-LOC");
    } else {
      push(pick(lexicon().determiners), "DT", "B-NP", "O", "I-ARGM-LOC");
      push(pick(lexicon().nouns[domain()]), "NN", "I-NP", "O", "I-ARGM-LOC");
    }
  }

  diff::Rng& rng_;
  bool shifted_;
  ToySentence s_;
};

Split to_split(const std::vector<ToySentence>& sentences, ToyColumn column,
               LabelInventory& labels) {
  Split out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    const std::vector<std::string>* layer = nullptr;
    switch (column) {
      case kToyPos: layer = &s.pos; break;
      case kToyChunk: layer = &s.chunk; break;
      case kToyNer: layer = &s.ner; break;
      case kToySrl: layer = &s.srl; break;
    }
    TaggedSentence t;
    t.tokens = s.tokens;
    for (const auto& tag : *layer) t.tags.push_back(labels.intern(tag));
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<ToySentence> generate_toy_sentences(std::size_t count,
                                                std::uint64_t seed,
                                                bool shifted) {
  diff::Rng rng(seed);
  std::vector<ToySentence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(Builder(rng, shifted).build());
  }
  return out;
}

void write_toy_conll(std::ostream& out, const std::vector<ToySentence>& s) {
  for (const auto& sent : s) {
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      out << sent.tokens[i] << '\t' << sent.pos[i] << '\t' << sent.chunk[i]
          << '\t' << sent.ner[i] << '\t' << sent.srl[i] << '\n';
    }
    out << '\n';
  }
}

namespace {

std::vector<ToySentence> in_domain_sentences(std::uint64_t seed,
                                             const ToySplits& splits) {
  return generate_toy_sentences(splits.train + splits.dev + splits.test, seed);
}

std::vector<ToySentence> ood_sentences(std::uint64_t seed,
                                       const ToySplits& splits) {
  return generate_toy_sentences(splits.ood, seed ^ 0x5eedULL, true);
}

}  // namespace

std::vector<std::string> write_toy_files(const std::string& dir,
                                         std::uint64_t seed,
                                         const ToySplits& splits) {
  const auto in_domain = in_domain_sentences(seed, splits);
  const auto begin = in_domain.begin();
  const std::size_t dev_end = splits.train + splits.dev;
  const std::vector<std::pair<std::string, std::vector<ToySentence>>> files = {
      {"train.conll", {begin, begin + splits.train}},
      {"dev.conll", {begin + splits.train, begin + dev_end}},
      {"test.conll", {begin + dev_end, in_domain.end()}},
      {"ood.conll", ood_sentences(seed, splits)},
  };
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& [name, sentences] : files) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_toy_conll(out, sentences);
    if (!out) throw IoError("failed writing '" + path + "'");
    paths.push_back(path);
  }
  return paths;
}

Corpus toy_corpus(const std::string& task_name, ToyColumn column,
                  std::uint64_t seed, const ToySplits& splits) {
  const auto in_domain = in_domain_sentences(seed, splits);
  Corpus c;
  c.task.name = task_name;
  auto begin = in_domain.begin();
  std::vector<ToySentence> train(begin, begin + splits.train);
  std::vector<ToySentence> dev(begin + splits.train,
                               begin + splits.train + splits.dev);
  std::vector<ToySentence> test(begin + splits.train + splits.dev,
                                in_domain.end());
  c.train = to_split(train, column, c.task.labels);
  c.dev = to_split(dev, column, c.task.labels);
  c.test = to_split(test, column, c.task.labels);
  if (splits.ood > 0) {
    c.extra["ood"] = to_split(ood_sentences(seed, splits), column, c.task.labels);
  }
  return c;
}

}  // namespace sluice::data
