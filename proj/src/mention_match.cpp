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

#include "linkforge/mention_match.hpp"

#include <algorithm>

#include "linkforge/text.hpp"

namespace linkforge {

MentionMatcher::MentionMatcher(const std::vector<std::string>& mentions) {
  for (const auto& mention : mentions) {
    Pattern pattern;
    pattern.folded = text::fold(std::u32string_view(text::decode(mention)));
    auto trimmed = text::trim(std::u32string_view(pattern.folded));
    pattern.folded = std::u32string(trimmed);
    if (pattern.folded.empty()) continue;
    pattern.word_boundary = std::none_of(pattern.folded.begin(), pattern.folded.end(), text::is_scriptio_continua);
    patterns_.push_back(std::move(pattern));
  }
}

bool MentionMatcher::occurs_at(const std::u32string& text, const Pattern& pattern, std::size_t at) {
  if (!pattern.word_boundary) return true;
  const auto& p = pattern.folded;
  std::size_t end = at + p.size();
  bool left_ok = at == 0 || !text::is_word_char(text[at - 1]) || !text::is_word_char(p.front());
  bool right_ok = end == text.size() || !text::is_word_char(text[end]) || !text::is_word_char(p.back());
  return left_ok && right_ok;
}

bool MentionMatcher::matches(std::string_view text) const {
  if (patterns_.empty()) return false;
  std::u32string folded = text::fold(std::u32string_view(text::decode(text)));
  for (const auto& pattern : patterns_) {
    for (auto at = folded.find(pattern.folded); at != std::u32string::npos;
         at = folded.find(pattern.folded, at + 1)) {
      if (occurs_at(folded, pattern, at)) return true;
    }
  }
  return false;
}

std::vector<std::pair<std::size_t, std::size_t>> MentionMatcher::find_all(std::string_view text) const {
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  if (patterns_.empty()) return hits;
  text::FoldedText folded = text::fold_with_mapping(text::decode(text));
  for (const auto& pattern : patterns_) {
    for (auto at = folded.text.find(pattern.folded); at != std::u32string::npos;
         at = folded.text.find(pattern.folded, at + 1)) {
      if (!occurs_at(folded.text, pattern, at)) continue;
      hits.emplace_back(folded.source_begin[at], folded.source_end[at + pattern.folded.size() - 1]);
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& hit : hits) {
    if (!merged.empty() && hit.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, hit.second);
    } else {
      merged.push_back(hit);
    }
  }
  return merged;
}

bool contains_mention(std::string_view text, std::string_view mention) {
  return MentionMatcher({std::string(mention)}).matches(text);
}

}  // namespace linkforge
