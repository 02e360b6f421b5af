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

#include "encoder/vocabulary.hpp"

namespace sluice::encoder {

Vocabulary::Vocabulary() {
  words_.emplace_back(kUnkSymbol);
  chars_.emplace_back(kUnkSymbol);
}

std::uint32_t Vocabulary::add_word(const std::string& word) {
  auto [it, inserted] =
      word_ids_.try_emplace(word, static_cast<std::uint32_t>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

std::uint32_t Vocabulary::add_char(const std::string& ch) {
  auto [it, inserted] =
      char_ids_.try_emplace(ch, static_cast<std::uint32_t>(chars_.size()));
  if (inserted) chars_.push_back(ch);
  return it->second;
}

std::uint32_t Vocabulary::word_id(const std::string& word) const {
  auto it = word_ids_.find(word);
  return it == word_ids_.end() ? kUnk : it->second;
}

std::uint32_t Vocabulary::char_id(const std::string& ch) const {
  auto it = char_ids_.find(ch);
  return it == char_ids_.end() ? kUnk : it->second;
}

std::vector<std::uint32_t> Vocabulary::char_ids(std::string_view token) const {
  std::vector<std::uint32_t> ids;
  for (const auto& ch : utf8_chars(token)) ids.push_back(char_id(ch));
  return ids;
}

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if ((lead & 0xE0) == 0xC0) {
      len = 2;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
    }
    if (i + len > text.size()) len = 1;
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace sluice::encoder
