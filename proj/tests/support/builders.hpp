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

#include <string>
#include <utility>
#include <vector>

#include "linkforge/corpus_model.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/text.hpp"

namespace linkforge::testing {

struct SectionSpec {
  std::string title;
  std::vector<std::string> sentences;
};

// Builds a valid article: sentences of a section joined by single spaces.
inline ArticleRecord make_article(const std::string& title, const std::string& qid,
                                  const std::vector<SectionSpec>& sections, const std::string& snapshot = "s1",
                                  const std::string& lang = "en") {
  ArticleRecord a;
  a.title = title;
  a.qid = qid;
  a.lang = lang;
  a.snapshot = snapshot;
  a.article_id = make_article_id(lang, title, snapshot);
  for (const auto& spec : sections) {
    Section s;
    s.title = spec.title;
    std::size_t cursor = 0;
    for (const auto& sentence : spec.sentences) {
      if (!s.text.empty()) {
        s.text += " ";
        ++cursor;
      }
      std::size_t len = text::length(sentence);
      s.sentences.push_back({sentence, cursor, cursor + len});
      s.text += sentence;
      cursor += len;
    }
    a.sections.push_back(std::move(s));
  }
  a.lead = a.sections.empty() || a.sections[0].sentences.empty() ? "Lead." : a.sections[0].sentences[0].text;
  return a;
}

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {
      "river", "castle", "music", "engine", "forest", "harbor", "planet", "garden", "bridge", "school",
      "market", "temple", "island", "valley", "signal", "theory", "winter", "summer", "canal",  "museum",
      "Ålesund", "Nurmijärvi", "café", "naïve", "straße", "東京", "データ", "Zürich", "Øresund", "über"};
  return words;
}

// A random sentence: capitalized first word, 3-10 words, terminal period.
inline std::string random_sentence(Rng& rng, const std::vector<std::string>& words = word_pool()) {
  std::size_t n = 3 + uniform_index(rng, 8);
  std::string s = "Item";
  for (std::size_t i = 0; i < n; ++i) {
    s += " ";
    s += words[uniform_index(rng, words.size())];
  }
  s += ".";
  return s;
}

inline ArticleRecord random_article(Rng& rng, const std::string& title, std::size_t max_sections = 4,
                                    std::size_t max_sentences = 12) {
  std::vector<SectionSpec> specs;
  std::size_t ns = 1 + uniform_index(rng, max_sections);
  for (std::size_t i = 0; i < ns; ++i) {
    SectionSpec spec{i == 0 ? "" : "Section " + std::to_string(i), {}};
    std::size_t nsent = 1 + uniform_index(rng, max_sentences);
    for (std::size_t k = 0; k < nsent; ++k) spec.sentences.push_back(random_sentence(rng));
    specs.push_back(std::move(spec));
  }
  return make_article(title, "Q" + std::to_string(1000 + uniform_index(rng, 100000)), specs);
}

}  // namespace linkforge::testing
