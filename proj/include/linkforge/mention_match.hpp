// Copyright 2026 The Linkforge Authors.
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

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace linkforge {

// Tests text for occurrences of previously used mentions of an entity.
//
// Both sides are NFKC-normalized and case-folded. A mention written in a
// space-delimited script must match on word boundaries ("BM25" does not
// match inside "BM250"); a mention containing Han, kana, Thai, Lao, Khmer or
// Myanmar characters matches as a plain substring.
class MentionMatcher {
 public:
  MentionMatcher() = default;
  explicit MentionMatcher(const std::vector<std::string>& mentions);

  bool empty() const { return patterns_.empty(); }
  bool matches(std::string_view text) const;

  // Merged [start, end) code point ranges in `text` covered by any
  // occurrence, ascending.
  std::vector<std::pair<std::size_t, std::size_t>> find_all(std::string_view text) const;

 private:
  struct Pattern {
    std::u32string folded;
    bool word_boundary = true;
  };

  static bool occurs_at(const std::u32string& text, const Pattern& pattern, std::size_t at);

  std::vector<Pattern> patterns_;
};

bool contains_mention(std::string_view text, std::string_view mention);

}  // namespace linkforge
