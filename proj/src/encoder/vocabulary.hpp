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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sluice::encoder {

// Word and character indices. Id 0 of each map is the unknown symbol; all
// other ids are dense and assigned in first-occurrence order.
class Vocabulary {
 public:
  static constexpr std::uint32_t kUnk = 0;
  static constexpr std::string_view kUnkSymbol = "<unk>";

  Vocabulary();

  std::uint32_t add_word(const std::string& word);
  std::uint32_t add_char(const std::string& ch);

  std::uint32_t word_id(const std::string& word) const;
  std::uint32_t char_id(const std::string& ch) const;
  const std::string& word(std::uint32_t id) const { return words_.at(id); }
  const std::string& character(std::uint32_t id) const { return chars_.at(id); }

  std::size_t word_count() const { return words_.size(); }
  std::size_t char_count() const { return chars_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& chars() const { return chars_; }

  // Character ids of a UTF-8 token, one per code point.
  std::vector<std::uint32_t> char_ids(std::string_view token) const;

 private:
  std::vector<std::string> words_;
  std::vector<std::string> chars_;
  std::unordered_map<std::string, std::uint32_t> word_ids_;
  std::unordered_map<std::string, std::uint32_t> char_ids_;
};

// Splits UTF-8 text into code-point substrings. Invalid lead bytes become
// single-byte units.
std::vector<std::string> utf8_chars(std::string_view text);

}  // namespace sluice::encoder
