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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "linkforge/corpus_model.hpp"

// Article markup parsing, sentence segmentation and existing-link
// extraction.
//
// Input grammar (one article per file):
//
//   <article title="..." qid="Q42" lang="en">
//     <p>lead paragraph, may hold <a href="qid:Q7">links</a></p>
//     <section title="History">
//       <p>...</p>
//       <figure>..</figure> <table>..</table> <note>..</note> <caption>..</caption>
//     </section>
//   </article>
//
// Paragraphs placed before the first <section> form an untitled lead
// section. Anything inside figure/table/note/caption is dropped, so links
// there are never extracted. Whitespace inside paragraphs collapses to
// single spaces. The five XML character entities and numeric references are
// decoded.
namespace linkforge::ingest {

struct RawArticle {
  std::string markup;
  std::string title;
  std::optional<std::string> qid;
  std::string lang;
  std::string snapshot;
};

// Reads the <article> attributes (title, qid, lang) from markup. `lang`
// falls back to `default_lang` when the attribute is absent.
RawArticle make_raw_article(std::string markup, std::string snapshot, std::string_view default_lang = "en");

// Per-language abbreviation list; a period ending a listed token never ends
// a sentence. Lines are "<lang>\t<token>"; lang "*" applies to every
// language; '#' starts a comment.
class AbbreviationTable {
 public:
  AbbreviationTable() = default;
  static AbbreviationTable parse(std::string_view tsv);
  // The table shipped in data/abbreviations.tsv, compiled in.
  static const AbbreviationTable& builtin();

  void add(std::string lang, std::string token);
  bool contains(std::string_view lang, std::string_view token) const;

 private:
  std::map<std::string, std::set<std::string>, std::less<>> by_lang_;
};

// Rule-based segmentation. Splits after . ! ? (and script equivalents such
// as । ؟ ۔ ።) when followed by whitespace and an uppercase letter, digit or
// uncased letter, unless the period closes an abbreviation; splits after
// 。！？ unconditionally, and at newlines. Sentences are trimmed; offsets
// are code points into `text`. Text with no boundary is one sentence.
std::vector<Sentence> segment_sentences(std::string_view text, std::string_view lang,
                                        const AbbreviationTable& abbreviations = AbbreviationTable::builtin());

// A link occurrence inside a parsed article. Offsets are code points into
// the section text.
struct LinkAnchor {
  std::size_t section = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string target_qid;
};

struct ParsedArticle {
  ArticleRecord record;
  std::vector<LinkAnchor> anchors;  // document order
  std::optional<std::string> rejection;  // "no lead" or "no qid"
  std::size_t empty_anchors = 0;
};

// Throws ParseError (message carries line:column) on malformed markup.
// Articles without lead or qid are returned with `rejection` set.
ParsedArticle parse_article(const RawArticle& raw,
                            const AbbreviationTable& abbreviations = AbbreviationTable::builtin());

struct TargetInfo {
  std::string title;
  std::string lead;
};
using TargetIndex = std::unordered_map<std::string, TargetInfo>;

struct ExtractStats {
  std::size_t emitted = 0;
  std::size_t self_links = 0;
  std::size_t unknown_targets = 0;
  std::size_t empty_anchors = 0;

  ExtractStats& operator+=(const ExtractStats& other);
};

inline constexpr std::size_t kDefaultContextWindow = 5;

// One LinkRecord per main-body link. The context is the link's sentence
// plus up to `window` sentences on either side, clipped to the section.
// A link whose anchor runs over several sentences is anchored at the
// sentence holding its first character; the recorded sentence range then
// extends to the sentence holding its last character.
std::vector<LinkRecord> extract_links(const ParsedArticle& article, const TargetIndex& targets,
                                      std::size_t window = kDefaultContextWindow, ExtractStats* stats = nullptr);

std::vector<LinkRecord> extract_links(const ArticleRecord& article, const RawArticle& raw, const TargetIndex& targets,
                                      std::size_t window = kDefaultContextWindow, ExtractStats* stats = nullptr);

// Index of the sentence whose [start, end) holds `offset`, else the first
// sentence starting after it; nullopt when past the last sentence.
std::optional<std::size_t> sentence_at(const Section& section, std::size_t offset);

}  // namespace linkforge::ingest
