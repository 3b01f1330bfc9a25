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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkforge/corpus_model.hpp"
#include "linkforge/ingest.hpp"

// Added-link detection between two snapshots, localization of each addition
// in the source article's revision history, and scenario classification.
namespace linkforge::diff {

// (src_qid, tgt_qid). Repeated occurrences of a pair in one article
// collapse to one identity.
using LinkPair = std::pair<std::string, std::string>;

// Pairs present in `b` but not in `a`, sorted.
std::vector<LinkPair> diff_links(const std::vector<LinkRecord>& a, const std::vector<LinkRecord>& b);

struct Version {
  std::string version_id;
  std::string timestamp;  // ISO 8601; compared as text
  ingest::RawArticle article;
};

struct RevisionHistory {
  std::string article_id;
  std::vector<Version> versions;  // oldest first
};

// Splits a history file into versions. Each version starts with a line
// "---VERSION <id> <timestamp>---" followed by one article's markup.
// Throws ParseError for a missing or malformed marker and InvariantError
// ("no versions", "version order") for an empty or unordered history.
RevisionHistory parse_history(std::string_view content, std::string article_id, std::string_view default_lang = "en");
RevisionHistory load_history(const std::filesystem::path& path, std::string_view default_lang = "en");

// Every *.history file under `dir`, keyed by the qid of its latest version.
// Files whose latest version has no qid are skipped.
std::map<std::string, RevisionHistory> load_histories(const std::filesystem::path& dir,
                                                      std::string_view default_lang = "en");

// Number of main-body anchors from pair.first to pair.second in each
// version. Versions whose qid differs from pair.first count zero.
std::vector<std::size_t> link_counts(const RevisionHistory& history, const LinkPair& pair,
                                     const ingest::AbbreviationTable& abbreviations = ingest::AbbreviationTable::builtin());

// Index i of the first version with counts[i-1] == 0 and counts[i] >= 1.
// Throws DataError("not localizable") when there is none.
std::size_t first_transition(const std::vector<std::size_t>& counts);

// (before_version_id, after_version_id) of the earliest 0 -> >=1 transition.
std::pair<std::string, std::string> locate_insertion(const RevisionHistory& history, const LinkPair& pair);

struct ClassifyOptions {
  double jaccard_threshold = 0.5;
  std::size_t max_trim_tokens = 3;
};

// Token-set Jaccard similarity over folded tokens. Two empty sets give 0.
double token_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Decides how `link` (extracted from `after`) was inserted relative to
// `before`. Version ids are left empty for the caller. Throws
// DataError("section not found") when the link's context cannot be traced
// to a section of `after`.
InsertionEvent classify_insertion(const ArticleRecord& before, const ArticleRecord& after, const LinkRecord& link,
                                  const ClassifyOptions& options = {});

// Localizes `pair` in `history`, extracts the first occurrence of the link
// from the after-version and classifies it.
InsertionEvent build_event(const RevisionHistory& history, const LinkPair& pair, const ingest::TargetInfo& target,
                           std::size_t window = ingest::kDefaultContextWindow, const ClassifyOptions& options = {});

}  // namespace linkforge::diff
