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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Domain records shared by every pipeline stage, and their canonical
// one-record-per-line JSON encoding.
//
// All offsets are code point indices. Every record is validated when it is
// serialized and again when it is parsed, so a record that breaks an
// invariant is never observable downstream.
namespace linkforge {

inline constexpr std::string_view kSchemaVersion = "linkforge/v1";

struct Sentence {
  std::string text;
  std::size_t start = 0;  // into the owning section's text
  std::size_t end = 0;

  bool operator==(const Sentence&) const = default;
};

struct Section {
  std::string title;
  // Paragraphs joined by '\n'. Sentences are slices of this text; the gaps
  // between them hold only whitespace.
  std::string text;
  std::vector<Sentence> sentences;

  bool operator==(const Section&) const = default;
};

struct ArticleRecord {
  std::string article_id;
  std::string title;
  std::optional<std::string> qid;
  std::string lang;
  std::string lead;
  std::vector<Section> sections;
  std::string snapshot;

  std::size_t sentence_count() const;
  // First section with this title.
  const Section* find_section(std::string_view title) const;

  bool operator==(const ArticleRecord&) const = default;
};

// Hash of (lang, title, snapshot) rendered as 16 hex digits.
std::string make_article_id(std::string_view lang, std::string_view title, std::string_view snapshot);

struct LinkRecord {
  std::string src_qid;
  std::string tgt_qid;
  std::string src_title;
  std::string tgt_title;
  std::string tgt_lead;
  std::string section_title;
  std::string context;
  std::string mention;
  std::size_t mention_start = 0;
  std::size_t mention_end = 0;
  std::size_t sentence_start = 0;
  std::size_t sentence_end = 0;
  std::string lang;

  bool operator==(const LinkRecord&) const = default;
};

enum class InsertionScenario {
  kTextPresent,
  kMissingMention,
  kMissingSentence,
  kMissingSpan,
  kMissingSection,
};

std::string_view to_string(InsertionScenario scenario);
// Throws DataError("unknown scenario") for unrecognized tags.
InsertionScenario parse_scenario(std::string_view tag);

struct InsertionEvent {
  LinkRecord link;  // context taken from the version after the insertion
  InsertionScenario scenario = InsertionScenario::kTextPresent;
  std::string before_version_id;
  std::string after_version_id;
  // article_id of the before-version ArticleRecord the candidates come from.
  std::string before_article_id;
  std::string insertion_section;
  std::size_t insertion_anchor = 0;

  bool operator==(const InsertionEvent&) const = default;
};

// Where the link sits inside a gold span. Only present for golds whose
// mention occurs in the span text; dynamic context removal needs it.
struct SpanPositions {
  std::size_t mention_start = 0;
  std::size_t mention_end = 0;
  std::size_t sentence_start = 0;
  std::size_t sentence_end = 0;
  // Every sentence of the span, as [start, end) into the span text.
  std::vector<std::pair<std::size_t, std::size_t>> sentences;

  bool operator==(const SpanPositions&) const = default;
};

struct CandidateSpan {
  std::string article_id;
  std::size_t section_index = 0;
  std::string section_title;
  std::size_t anchor_index = 0;
  std::size_t window = 5;
  std::string text;
  bool is_gold = false;
  std::optional<SpanPositions> positions;

  bool operator==(const CandidateSpan&) const = default;
};

struct TargetEntity {
  std::string title;
  std::string lead;
  std::vector<std::string> mentions;

  bool operator==(const TargetEntity&) const = default;
};

struct RankingExample {
  std::string example_id;
  TargetEntity target;
  std::vector<CandidateSpan> candidates;
  std::size_t gold_index = 0;
  InsertionScenario scenario = InsertionScenario::kTextPresent;
  std::string lang;

  const CandidateSpan& gold() const { return candidates.at(gold_index); }

  bool operator==(const RankingExample&) const = default;
};

enum class RemovalStrategy { kNothing, kMention, kSentence, kSpan };

std::string_view to_string(RemovalStrategy strategy);
RemovalStrategy parse_strategy(std::string_view tag);

struct AugmentedExample {
  RankingExample base;  // gold text already rewritten
  RemovalStrategy applied_strategy = RemovalStrategy::kNothing;
  // Removed [start, end) ranges, in the original gold text, ascending.
  std::vector<std::pair<std::size_t, std::size_t>> removed_ranges;

  bool operator==(const AugmentedExample&) const = default;
};

struct Ranking {
  std::string example_id;
  std::string method;
  std::vector<double> scores;
  // Candidate indices by descending score, ties by ascending index.
  std::vector<std::size_t> order;

  bool operator==(const Ranking&) const = default;
};

// Sorts indices by descending score with ascending-index tie-break.
Ranking make_ranking(std::string example_id, std::string method, std::vector<double> scores);

enum class RecordKind { kArticle, kLink, kEvent, kExample, kAugmented, kRanking };

std::string_view to_string(RecordKind kind);
RecordKind parse_kind(std::string_view tag);

using Record = std::variant<ArticleRecord, LinkRecord, InsertionEvent, RankingExample, AugmentedExample, Ranking>;

// Invariant checks. Each throws InvariantError naming the violated rule.
void validate(const ArticleRecord& record);
void validate(const LinkRecord& record);
void validate(const InsertionEvent& record);
void validate(const CandidateSpan& record);
void validate(const RankingExample& record);
void validate(const AugmentedExample& record);
void validate(const Ranking& record);

// One newline-free line. Throws InvariantError if the record is invalid.
std::string serialize_record(const ArticleRecord& record);
std::string serialize_record(const LinkRecord& record);
std::string serialize_record(const InsertionEvent& record);
std::string serialize_record(const CandidateSpan& record);
std::string serialize_record(const RankingExample& record);
std::string serialize_record(const AugmentedExample& record);
std::string serialize_record(const Ranking& record);
std::string serialize_record(const Record& record);

// Throws ParseError (with byte offset) for malformed lines and
// InvariantError for well-formed records that break an invariant.
Record deserialize_record(std::string_view line, RecordKind kind);

template <typename T>
T deserialize_as(std::string_view line);

template <>
ArticleRecord deserialize_as<ArticleRecord>(std::string_view line);
template <>
LinkRecord deserialize_as<LinkRecord>(std::string_view line);
template <>
InsertionEvent deserialize_as<InsertionEvent>(std::string_view line);
template <>
CandidateSpan deserialize_as<CandidateSpan>(std::string_view line);
template <>
RankingExample deserialize_as<RankingExample>(std::string_view line);
template <>
AugmentedExample deserialize_as<AugmentedExample>(std::string_view line);
template <>
Ranking deserialize_as<Ranking>(std::string_view line);

template <typename T>
struct RecordKindOf;
template <>
struct RecordKindOf<ArticleRecord> {
  static constexpr RecordKind value = RecordKind::kArticle;
};
template <>
struct RecordKindOf<LinkRecord> {
  static constexpr RecordKind value = RecordKind::kLink;
};
template <>
struct RecordKindOf<InsertionEvent> {
  static constexpr RecordKind value = RecordKind::kEvent;
};
template <>
struct RecordKindOf<RankingExample> {
  static constexpr RecordKind value = RecordKind::kExample;
};
template <>
struct RecordKindOf<AugmentedExample> {
  static constexpr RecordKind value = RecordKind::kAugmented;
};
template <>
struct RecordKindOf<Ranking> {
  static constexpr RecordKind value = RecordKind::kRanking;
};

// File header line: {"schema":"linkforge/v1","kind":<tag>}.
std::string header_line(RecordKind kind);
// Throws ParseError if `line` is not a header of the expected kind.
RecordKind parse_header(std::string_view line);

}  // namespace linkforge
