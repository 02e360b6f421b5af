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
#include <memory>
#include <string>
#include <vector>

#include "diff/rng.hpp"
#include "model/model.hpp"

namespace sluice::testing {

inline model::ModelConfig small_config(std::size_t tasks, std::size_t layers,
                                       std::size_t hidden = 4,
                                       std::size_t labels = 3) {
  model::ModelConfig c;
  for (std::size_t m = 0; m < tasks; ++m) {
    c.task_names.push_back("T" + std::to_string(m + 1));
    c.label_counts.push_back(labels);
  }
  c.embedding = {5, 4, 3};
  c.network = {layers, hidden, 2, 5};
  return c;
}

inline std::unique_ptr<model::SluiceModel> small_model(
    const model::ModelConfig& c, std::uint64_t seed, std::size_t words = 6,
    std::size_t chars = 7) {
  diff::Rng rng(seed);
  return std::make_unique<model::SluiceModel>(c, words, chars, rng);
}

inline model::EncodedSentence random_sentence(std::size_t length,
                                              diff::Rng& rng,
                                              std::size_t words = 6,
                                              std::size_t chars = 7) {
  model::EncodedSentence s;
  for (std::size_t t = 0; t < length; ++t) {
    s.words.push_back(static_cast<std::uint32_t>(rng.uniform_index(words)));
    std::vector<std::uint32_t> cs(1 + rng.uniform_index(3));
    for (auto& c : cs) c = static_cast<std::uint32_t>(rng.uniform_index(chars));
    s.chars.push_back(cs);
  }
  return s;
}

inline std::vector<std::uint32_t> random_tags(std::size_t length,
                                              std::size_t labels,
                                              diff::Rng& rng) {
  std::vector<std::uint32_t> tags(length);
  for (auto& t : tags) t = static_cast<std::uint32_t>(rng.uniform_index(labels));
  return tags;
}

// Replaces every trainable parameter entry with a uniform draw in [lo, hi].
// Frozen entries keep their values.
inline void randomize(model::SluiceModel& m, diff::Rng& rng, double lo = -0.5,
                      double hi = 0.5) {
  for (auto* p : m.parameters()) {
    auto values = p->mutable_value().mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!p->is_frozen(i)) values[i] = rng.uniform(lo, hi);
    }
  }
}

}  // namespace sluice::testing
