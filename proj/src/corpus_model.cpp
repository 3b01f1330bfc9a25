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

#include "linkforge/corpus_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "linkforge/errors.hpp"
#include "linkforge/hash.hpp"
#include "linkforge/mention_match.hpp"
#include "linkforge/text.hpp"

namespace linkforge {

using nlohmann::json;

namespace {

constexpr std::string_view kScenarioTags[] = {
    "text_present", "missing_mention", "missing_sentence", "missing_span", "missing_section"};
constexpr std::string_view kStrategyTags[] = {"rm_nth", "rm_mention", "rm_sent", "rm_span"};
constexpr std::string_view kKindTags[] = {"article", "link", "event", "example", "augmented", "ranking"};

void require(bool ok, const char* invariant, const std::string& detail = "") {
  if (!ok) throw InvariantError(invariant, detail);
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::strict); }

// ---- field access -------------------------------------------------------

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw ParseError("expected JSON object", 0);
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing field '") + name + "'", 0);
  return *it;
}

std::string get_string(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) throw ParseError(std::string("field '") + name + "' is not a string", 0);
  return v.get<std::string>();
}

std::size_t get_index(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_unsigned()) {
    throw ParseError(std::string("field '") + name + "' is not a non-negative integer", 0);
  }
  return v.get<std::size_t>();
}

bool get_bool(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_boolean()) throw ParseError(std::string("field '") + name + "' is not a boolean", 0);
  return v.get<bool>();
}

std::vector<std::pair<std::size_t, std::size_t>> get_ranges(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_array()) throw ParseError(std::string("field '") + name + "' is not an array", 0);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& pair : v) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned()) {
      throw ParseError(std::string("field '") + name + "' holds a malformed range", 0);
    }
    out.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
  }
  return out;
}

json ranges_json(const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  json out = json::array();
  for (const auto& [s, e] : ranges) out.push_back(json::array({s, e}));
  return out;
}

// ---- to_json ------------------------------------------------------------

json to_json(const ArticleRecord& r) {
  json sections = json::array();
  for (const auto& section : r.sections) {
    json sentences = json::array();
    for (const auto& s : section.sentences) sentences.push_back(json::array({s.start, s.end}));
    sections.push_back({{"title", section.title}, {"text", section.text}, {"sentences", sentences}});
  }
  return {{"article_id", r.article_id}, {"title", r.title}, {"qid", r.qid.value_or("")},
          {"lang", r.lang},             {"lead", r.lead},   {"sections", sections},
          {"snapshot", r.snapshot}};
}

json to_json(const LinkRecord& r) {
  return {{"src_qid", r.src_qid},
          {"tgt_qid", r.tgt_qid},
          {"src_title", r.src_title},
          {"tgt_title", r.tgt_title},
          {"tgt_lead", r.tgt_lead},
          {"section_title", r.section_title},
          {"context", r.context},
          {"mention", r.mention},
          {"mention_start", r.mention_start},
          {"mention_end", r.mention_end},
          {"sentence_start", r.sentence_start},
          {"sentence_end", r.sentence_end},
          {"lang", r.lang}};
}

json to_json(const InsertionEvent& r) {
  return {{"link", to_json(r.link)},
          {"scenario", to_string(r.scenario)},
          {"before_version_id", r.before_version_id},
          {"after_version_id", r.after_version_id},
          {"before_article_id", r.before_article_id},
          {"insertion_section", r.insertion_section},
          {"insertion_anchor", r.insertion_anchor}};
}

json to_json(const CandidateSpan& r) {
  json j = {{"article_id", r.article_id},       {"section_index", r.section_index}, {"section_title", r.section_title},
            {"anchor_index", r.anchor_index},   {"window", r.window},               {"text", r.text},
            {"is_gold", r.is_gold}};
  if (r.positions) {
    const auto& p = *r.positions;
    j["positions"] = {{"mention_start", p.mention_start},
                      {"mention_end", p.mention_end},
                      {"sentence_start", p.sentence_start},
                      {"sentence_end", p.sentence_end},
                      {"sentences", ranges_json(p.sentences)}};
  }
  return j;
}

json to_json(const RankingExample& r) {
  json candidates = json::array();
  for (const auto& c : r.candidates) candidates.push_back(to_json(c));
  return {{"example_id", r.example_id},
          {"target", {{"title", r.target.title}, {"lead", r.target.lead}, {"mentions", r.target.mentions}}},
          {"candidates", candidates},
          {"gold_index", r.gold_index},
          {"scenario", to_string(r.scenario)},
          {"lang", r.lang}};
}

json to_json(const AugmentedExample& r) {
  return {{"base", to_json(r.base)},
          {"strategy", to_string(r.applied_strategy)},
          {"removed_ranges", ranges_json(r.removed_ranges)}};
}

json to_json(const Ranking& r) {
  return {{"example_id", r.example_id}, {"method", r.method}, {"scores", r.scores}, {"order", r.order}};
}

// ---- from_json ----------------------------------------------------------

ArticleRecord article_from_json(const json& j) {
  ArticleRecord r;
  r.article_id = get_string(j, "article_id");
  r.title = get_string(j, "title");
  std::string qid = get_string(j, "qid");
  if (!qid.empty()) r.qid = qid;
  r.lang = get_string(j, "lang");
  r.lead = get_string(j, "lead");
  r.snapshot = get_string(j, "snapshot");
  const json& sections = field(j, "sections");
  if (!sections.is_array()) throw ParseError("field 'sections' is not an array", 0);
  for (const auto& s : sections) {
    Section section;
    section.title = get_string(s, "title");
    section.text = get_string(s, "text");
    std::size_t len = text::length(section.text);
    for (const auto& [start, end] : get_ranges(s, "sentences")) {
      require(start < end && end <= len, "sentence offsets", "range outside section text");
      section.sentences.push_back({text::slice(section.text, start, end), start, end});
    }
    r.sections.push_back(std::move(section));
  }
  return r;
}

LinkRecord link_from_json(const json& j) {
  LinkRecord r;
  r.src_qid = get_string(j, "src_qid");
  r.tgt_qid = get_string(j, "tgt_qid");
  r.src_title = get_string(j, "src_title");
  r.tgt_title = get_string(j, "tgt_title");
  r.tgt_lead = get_string(j, "tgt_lead");
  r.section_title = get_string(j, "section_title");
  r.context = get_string(j, "context");
  r.mention = get_string(j, "mention");
  r.mention_start = get_index(j, "mention_start");
  r.mention_end = get_index(j, "mention_end");
  r.sentence_start = get_index(j, "sentence_start");
  r.sentence_end = get_index(j, "sentence_end");
  r.lang = get_string(j, "lang");
  return r;
}

InsertionEvent event_from_json(const json& j) {
  InsertionEvent r;
  r.link = link_from_json(field(j, "link"));
  r.scenario = parse_scenario(get_string(j, "scenario"));
  r.before_version_id = get_string(j, "before_version_id");
  r.after_version_id = get_string(j, "after_version_id");
  r.before_article_id = get_string(j, "before_article_id");
  r.insertion_section = get_string(j, "insertion_section");
  r.insertion_anchor = get_index(j, "insertion_anchor");
  return r;
}

CandidateSpan span_from_json(const json& j) {
  CandidateSpan r;
  r.article_id = get_string(j, "article_id");
  r.section_index = get_index(j, "section_index");
  r.section_title = get_string(j, "section_title");
  r.anchor_index = get_index(j, "anchor_index");
  r.window = get_index(j, "window");
  r.text = get_string(j, "text");
  r.is_gold = get_bool(j, "is_gold");
  if (j.contains("positions")) {
    const json& p = j.at("positions");
    SpanPositions pos;
    pos.mention_start = get_index(p, "mention_start");
    pos.mention_end = get_index(p, "mention_end");
    pos.sentence_start = get_index(p, "sentence_start");
    pos.sentence_end = get_index(p, "sentence_end");
    pos.sentences = get_ranges(p, "sentences");
    r.positions = std::move(pos);
  }
  return r;
}

RankingExample example_from_json(const json& j) {
  RankingExample r;
  r.example_id = get_string(j, "example_id");
  const json& target = field(j, "target");
  r.target.title = get_string(target, "title");
  r.target.lead = get_string(target, "lead");
  const json& mentions = field(target, "mentions");
  if (!mentions.is_array()) throw ParseError("field 'mentions' is not an array", 0);
  for (const auto& m : mentions) {
    if (!m.is_string()) throw ParseError("mention is not a string", 0);
    r.target.mentions.push_back(m.get<std::string>());
  }
  const json& candidates = field(j, "candidates");
  if (!candidates.is_array()) throw ParseError("field 'candidates' is not an array", 0);
  for (const auto& c : candidates) r.candidates.push_back(span_from_json(c));
  r.gold_index = get_index(j, "gold_index");
  r.scenario = parse_scenario(get_string(j, "scenario"));
  r.lang = get_string(j, "lang");
  return r;
}

AugmentedExample augmented_from_json(const json& j) {
  AugmentedExample r;
  r.base = example_from_json(field(j, "base"));
  r.applied_strategy = parse_strategy(get_string(j, "strategy"));
  r.removed_ranges = get_ranges(j, "removed_ranges");
  return r;
}

Ranking ranking_from_json(const json& j) {
  Ranking r;
  r.example_id = get_string(j, "example_id");
  r.method = get_string(j, "method");
  const json& scores = field(j, "scores");
  if (!scores.is_array()) throw ParseError("field 'scores' is not an array", 0);
  for (const auto& s : scores) {
    if (!s.is_number()) throw InvariantError("non-finite score", "score is not a number");
    r.scores.push_back(s.get<double>());
  }
  const json& order = field(j, "order");
  if (!order.is_array()) throw ParseError("field 'order' is not an array", 0);
  for (const auto& o : order) {
    if (!o.is_number_unsigned()) throw ParseError("order entry is not an index", 0);
    r.order.push_back(o.get<std::size_t>());
  }
  return r;
}

json parse_line(std::string_view line) {
  if (line.find('\n') != std::string_view::npos) throw ParseError("embedded newline", line.find('\n'));
  try {
    return json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports 1-based positions.
    throw ParseError(std::string("malformed record: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
}

template <typename T, typename FromJson>
T parse_typed(std::string_view line, FromJson from_json) {
  json j = parse_line(line);
  T record;
  try {
    record = from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), 0);
  }
  validate(record);
  return record;
}

template <typename T>
std::string serialize_checked(const T& record) {
  validate(record);
  try {
    return dump(to_json(record));
  } catch (const json::type_error& e) {
    throw InvariantError("utf-8", e.what());
  }
}

void validate_positions(const SpanPositions& p, std::size_t text_len) {
  require(p.sentence_start <= p.mention_start && p.mention_start <= p.mention_end &&
              p.mention_end <= p.sentence_end && p.sentence_end <= text_len,
          "span positions", "mention/sentence offsets out of order");
  std::size_t prev_end = 0;
  bool first = true;
  for (const auto& [s, e] : p.sentences) {
    require(s < e && e <= text_len && (first || s >= prev_end), "span positions", "sentence bounds not ordered");
    prev_end = e;
    first = false;
  }
  if (p.mention_start < p.mention_end) {
    bool listed = std::find(p.sentences.begin(), p.sentences.end(),
                            std::make_pair(p.sentence_start, p.sentence_end)) != p.sentences.end();
    require(listed, "span positions", "mention sentence not among sentence bounds");
  }
}

}  // namespace

// ---- small helpers ------------------------------------------------------

std::size_t ArticleRecord::sentence_count() const {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.sentences.size();
  return n;
}

const Section* ArticleRecord::find_section(std::string_view wanted) const {
  for (const auto& s : sections) {
    if (s.title == wanted) return &s;
  }
  return nullptr;
}

std::string make_article_id(std::string_view lang, std::string_view title, std::string_view snapshot) {
  std::string key;
  key.append(lang).push_back('\x1f');
  key.append(title).push_back('\x1f');
  key.append(snapshot);
  return hex64(fnv1a64(key));
}

std::string_view to_string(InsertionScenario scenario) { return kScenarioTags[static_cast<int>(scenario)]; }

InsertionScenario parse_scenario(std::string_view tag) {
  for (int i = 0; i < 5; ++i) {
    if (kScenarioTags[i] == tag) return static_cast<InsertionScenario>(i);
  }
  throw DataError("unknown scenario", std::string(tag));
}

std::string_view to_string(RemovalStrategy strategy) { return kStrategyTags[static_cast<int>(strategy)]; }

RemovalStrategy parse_strategy(std::string_view tag) {
  for (int i = 0; i < 4; ++i) {
    if (kStrategyTags[i] == tag) return static_cast<RemovalStrategy>(i);
  }
  if (tag == "rm_sentence") return RemovalStrategy::kSentence;
  throw DataError("unknown strategy", std::string(tag));
}

std::string_view to_string(RecordKind kind) { return kKindTags[static_cast<int>(kind)]; }

RecordKind parse_kind(std::string_view tag) {
  for (int i = 0; i < 6; ++i) {
    if (kKindTags[i] == tag) return static_cast<RecordKind>(i);
  }
  throw ParseError("unknown record kind '" + std::string(tag) + "'", 0);
}

Ranking make_ranking(std::string example_id, std::string method, std::vector<double> scores) {
  Ranking r{std::move(example_id), std::move(method), std::move(scores), {}};
  r.order.resize(r.scores.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
  return r;
}

// ---- validation ---------------------------------------------------------

void validate(const ArticleRecord& r) {
  require(r.qid.has_value() && !r.qid->empty(), "missing qid", r.title);
  require(!text::is_blank(r.lead), "missing lead", r.title);
  require(!r.lang.empty(), "missing lang", r.title);
  require(r.article_id == make_article_id(r.lang, r.title, r.snapshot), "article id", r.title);
  for (const auto& section : r.sections) {
    std::u32string text = text::decode(section.text);
    std::size_t cursor = 0;
    for (const auto& s : section.sentences) {
      require(s.start >= cursor && s.start < s.end && s.end <= text.size(), "sentence offsets",
              "section '" + section.title + "'");
      for (std::size_t i = cursor; i < s.start; ++i) {
        require(text::is_space(text[i]), "sentence coverage", "non-space text between sentences");
      }
      require(text::encode(std::u32string_view(text).substr(s.start, s.end - s.start)) == s.text, "sentence text",
              "sentence does not match its offsets");
      cursor = s.end;
    }
    for (std::size_t i = cursor; i < text.size(); ++i) {
      require(text::is_space(text[i]), "sentence coverage", "non-space text after last sentence");
    }
  }
}

void validate(const LinkRecord& r) {
  require(!r.src_qid.empty() && !r.tgt_qid.empty(), "missing qid");
  require(r.src_qid != r.tgt_qid, "self-link", r.src_qid);
  require(!r.mention.empty(), "empty mention");
  require(r.sentence_start <= r.mention_start && r.mention_start < r.mention_end &&
              r.mention_end <= r.sentence_end,
          "offset order", "need sentence_start <= mention_start < mention_end <= sentence_end");
  require(r.sentence_end <= text::length(r.context), "offset order", "sentence_end beyond context");
  require(text::slice(r.context, r.mention_start, r.mention_end) == r.mention, "mention offsets",
          "context slice differs from mention");
}

void validate(const InsertionEvent& r) {
  validate(r.link);
  require(!r.before_version_id.empty() && !r.after_version_id.empty(), "missing version id");
  require(r.before_version_id != r.after_version_id, "version order", "before and after are the same version");
  require(!r.before_article_id.empty(), "missing article id");
}

void validate(const CandidateSpan& r) {
  require(!text::is_blank(r.text), "empty span");
  require(!r.article_id.empty(), "missing article id");
  if (r.positions) validate_positions(*r.positions, text::length(r.text));
}

void validate(const RankingExample& r) {
  require(!r.example_id.empty(), "missing example id");
  require(!r.candidates.empty(), "no candidates", r.example_id);
  require(r.gold_index < r.candidates.size(), "gold index", r.example_id);
  std::size_t golds = 0;
  for (const auto& c : r.candidates) {
    validate(c);
    golds += c.is_gold ? 1 : 0;
  }
  require(golds == 1 && r.candidates[r.gold_index].is_gold, "single gold", r.example_id);
  MentionMatcher matcher(r.target.mentions);
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    if (i == r.gold_index) continue;
    require(!matcher.matches(r.candidates[i].text), "negative contains mention",
            r.example_id + " candidate " + std::to_string(i));
  }
}

void validate(const AugmentedExample& r) {
  require(!text::is_blank(r.base.gold().text), "empty gold after removal", r.base.example_id);
  validate(r.base);
  std::size_t cursor = 0;
  for (const auto& [s, e] : r.removed_ranges) {
    require(s >= cursor && s < e, "removed ranges", "ranges must be ascending and non-empty");
    cursor = e;
  }
}

void validate(const Ranking& r) {
  require(!r.example_id.empty(), "missing example id");
  for (double s : r.scores) require(std::isfinite(s), "non-finite score", r.example_id);
  require(r.order.size() == r.scores.size(), "order size", r.example_id);
  std::vector<bool> seen(r.order.size(), false);
  for (std::size_t idx : r.order) {
    require(idx < seen.size() && !seen[idx], "order permutation", r.example_id);
    seen[idx] = true;
  }
  for (std::size_t i = 1; i < r.order.size(); ++i) {
    double prev = r.scores[r.order[i - 1]];
    double cur = r.scores[r.order[i]];
    require(prev > cur || (prev == cur && r.order[i - 1] < r.order[i]), "order sorted", r.example_id);
  }
}

// ---- serialization ------------------------------------------------------

std::string serialize_record(const ArticleRecord& r) { return serialize_checked(r); }
std::string serialize_record(const LinkRecord& r) { return serialize_checked(r); }
std::string serialize_record(const InsertionEvent& r) { return serialize_checked(r); }
std::string serialize_record(const CandidateSpan& r) { return serialize_checked(r); }
std::string serialize_record(const RankingExample& r) { return serialize_checked(r); }
std::string serialize_record(const AugmentedExample& r) { return serialize_checked(r); }
std::string serialize_record(const Ranking& r) { return serialize_checked(r); }

std::string serialize_record(const Record& record) {
  return std::visit([](const auto& r) { return serialize_record(r); }, record);
}

template <>
ArticleRecord deserialize_as<ArticleRecord>(std::string_view line) {
  return parse_typed<ArticleRecord>(line, article_from_json);
}
template <>
LinkRecord deserialize_as<LinkRecord>(std::string_view line) {
  return parse_typed<LinkRecord>(line, link_from_json);
}
template <>
InsertionEvent deserialize_as<InsertionEvent>(std::string_view line) {
  return parse_typed<InsertionEvent>(line, event_from_json);
}
template <>
CandidateSpan deserialize_as<CandidateSpan>(std::string_view line) {
  return parse_typed<CandidateSpan>(line, span_from_json);
}
template <>
RankingExample deserialize_as<RankingExample>(std::string_view line) {
  return parse_typed<RankingExample>(line, example_from_json);
}
template <>
AugmentedExample deserialize_as<AugmentedExample>(std::string_view line) {
  return parse_typed<AugmentedExample>(line, augmented_from_json);
}
template <>
Ranking deserialize_as<Ranking>(std::string_view line) {
  return parse_typed<Ranking>(line, ranking_from_json);
}

Record deserialize_record(std::string_view line, RecordKind kind) {
  switch (kind) {
    case RecordKind::kArticle: return deserialize_as<ArticleRecord>(line);
    case RecordKind::kLink: return deserialize_as<LinkRecord>(line);
    case RecordKind::kEvent: return deserialize_as<InsertionEvent>(line);
    case RecordKind::kExample: return deserialize_as<RankingExample>(line);
    case RecordKind::kAugmented: return deserialize_as<AugmentedExample>(line);
    case RecordKind::kRanking: return deserialize_as<Ranking>(line);
  }
  throw ParseError("unknown record kind", 0);
}

std::string header_line(RecordKind kind) {
  return std::string(R"({"schema":")") + std::string(kSchemaVersion) + R"(","kind":")" +
         std::string(to_string(kind)) + "\"}";
}

RecordKind parse_header(std::string_view line) {
  json j = parse_line(line);
  std::string schema = get_string(j, "schema");
  if (schema != kSchemaVersion) throw ParseError("unsupported schema '" + schema + "'", 0);
  return parse_kind(get_string(j, "kind"));
}

}  // namespace linkforge
