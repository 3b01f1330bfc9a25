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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "linkforge/corpus_model.hpp"
#include "linkforge/errors.hpp"
#include "support/builders.hpp"

using namespace linkforge;
using linkforge::testing::make_article;
using linkforge::testing::random_article;
using linkforge::testing::random_sentence;

namespace {

LinkRecord room_temperature_link() {
  LinkRecord l;
  l.src_qid = "Q1";
  l.tgt_qid = "Q2";
  l.src_title = "Brie";
  l.tgt_title = "Room temperature";
  l.tgt_lead = "Room temperature is the range of air temperatures most people prefer.";
  l.section_title = "Serving";
  l.context = "Serve soft. It is best eaten when it is somewhat below normal room temperature.";
  l.mention = "room temperature";
  l.mention_start = 62;
  l.mention_end = 78;
  l.sentence_start = 12;
  l.sentence_end = 79;
  l.lang = "en";
  return l;
}

template <typename T>
void check_round_trip(const T& record) {
  std::string line = serialize_record(record);
  CHECK(line.find('\n') == std::string::npos);
  T back = deserialize_as<T>(line);
  CHECK(back == record);
  CHECK(serialize_record(back) == line);
}

LinkRecord random_link(Rng& rng) {
  std::vector<std::string> sentences;
  std::size_t n = 1 + uniform_index(rng, 5);
  for (std::size_t i = 0; i < n; ++i) sentences.push_back(random_sentence(rng));
  std::size_t pick = uniform_index(rng, n);
  std::string context;
  std::size_t sentence_start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) context += " ";
    if (i == pick) sentence_start = text::length(context);
    context += sentences[i];
  }
  // Mention: the second word of the picked sentence ("Item <word> ...").
  const std::string& s = sentences[pick];
  auto u = text::decode(s);
  std::size_t ws = u.find(U' ') + 1;
  std::size_t we = u.find_first_of(U" .", ws);
  LinkRecord l;
  l.src_qid = "Q" + std::to_string(uniform_index(rng, 1000));
  l.tgt_qid = l.src_qid + "x";
  l.src_title = "Src";
  l.tgt_title = "Tgt";
  l.tgt_lead = random_sentence(rng);
  l.section_title = uniform_index(rng, 2) ? "" : "History";
  l.context = context;
  l.mention_start = sentence_start + ws;
  l.mention_end = sentence_start + we;
  l.mention = text::slice(context, l.mention_start, l.mention_end);
  l.sentence_start = sentence_start;
  l.sentence_end = sentence_start + u.size();
  l.lang = "en";
  return l;
}

CandidateSpan random_span(Rng& rng, bool gold) {
  CandidateSpan c;
  c.article_id = hex64(rng());
  c.section_index = uniform_index(rng, 4);
  c.section_title = "S" + std::to_string(c.section_index);
  c.anchor_index = uniform_index(rng, 30);
  c.window = uniform_index(rng, 6);
  std::string a = random_sentence(rng);
  std::string b = random_sentence(rng);
  c.text = a + " " + b;
  c.is_gold = gold;
  if (gold && uniform_index(rng, 2)) {
    std::size_t la = text::length(a);
    std::size_t lb = text::length(b);
    c.positions = SpanPositions{0, 4, 0, la, {{0, la}, {la + 1, la + 1 + lb}}};
  }
  return c;
}

RankingExample random_example(Rng& rng) {
  RankingExample e;
  e.example_id = "ex-" + hex64(rng());
  e.target = {"Target", random_sentence(rng), {"zzzunused"}};
  std::size_t n = 1 + uniform_index(rng, 6);
  e.gold_index = uniform_index(rng, n);
  for (std::size_t i = 0; i < n; ++i) e.candidates.push_back(random_span(rng, i == e.gold_index));
  e.scenario = static_cast<InsertionScenario>(uniform_index(rng, 4));
  e.lang = "en";
  return e;
}

}  // namespace

TEST_CASE("link record offsets survive a round trip") {
  LinkRecord l = room_temperature_link();
  std::string line = serialize_record(l);
  LinkRecord back = deserialize_as<LinkRecord>(line);
  CHECK(back.mention_start == 62);
  CHECK(back.mention_end == 78);
  CHECK(text::slice(back.context, back.mention_start, back.mention_end) == "room temperature");
}

TEST_CASE("article without qid is rejected as missing qid") {
  auto a = make_article("Brie", "Q1", {{"", {"Brie is a cheese."}}});
  a.qid.reset();
  try {
    serialize_record(a);
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(e.invariant() == "missing qid");
  }
  a.qid = "";
  CHECK_THROWS_AS(serialize_record(a), InvariantError);
}

TEST_CASE("article without lead is rejected") {
  auto a = make_article("Brie", "Q1", {{"", {"Brie is a cheese."}}});
  a.lead = "  ";
  try {
    serialize_record(a);
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(e.invariant() == "missing lead");
  }
}

TEST_CASE("candidate span with empty text is rejected as empty span") {
  CandidateSpan c;
  c.article_id = "a";
  try {
    serialize_record(c);
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(e.invariant() == "empty span");
  }
}

TEST_CASE("mention_start > mention_end is an invariant error on parse") {
  LinkRecord l = room_temperature_link();
  std::string line = serialize_record(l);
  auto pos = line.find("\"mention_start\":62");
  REQUIRE(pos != std::string::npos);
  line.replace(pos, 18, "\"mention_start\":80");
  CHECK_THROWS_AS(deserialize_as<LinkRecord>(line), InvariantError);
}

TEST_CASE("self-links are rejected") {
  LinkRecord l = room_temperature_link();
  l.tgt_qid = l.src_qid;
  try {
    serialize_record(l);
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(e.invariant() == "self-link");
  }
}

TEST_CASE("truncated line is a parse error and yields no record") {
  std::string line = serialize_record(room_temperature_link());
  for (std::size_t cut : {line.size() - 1, line.size() / 2, std::size_t{1}}) {
    try {
      (void)deserialize_record(line.substr(0, cut), RecordKind::kLink);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() <= cut);
    }
  }
}

TEST_CASE("missing field is a parse error naming the field") {
  std::string line = R"({"src_qid":"Q1"})";
  try {
    deserialize_as<LinkRecord>(line);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("tgt_qid") != std::string::npos);
  }
}

TEST_CASE("sentence offsets must reproduce the section text") {
  auto a = make_article("Brie", "Q1", {{"", {"Brie is a cheese.", "It is soft."}}});
  a.sections[0].sentences[1].start = 17;  // overlaps the gap and changes the text
  CHECK_THROWS_AS(validate(a), InvariantError);
  auto b = make_article("Brie", "Q1", {{"", {"Brie is a cheese.", "It is soft."}}});
  std::swap(b.sections[0].sentences[0], b.sections[0].sentences[1]);
  CHECK_THROWS_AS(validate(b), InvariantError);
}

TEST_CASE("examples reject a negative containing a target mention") {
  Rng rng(3);
  RankingExample e = random_example(rng);
  e.candidates.push_back(random_span(rng, false));
  e.candidates.back().text = "the BM25 formula is old.";
  e.target.mentions = {"BM25"};
  CHECK_THROWS_AS(validate(e), InvariantError);
}

TEST_CASE("examples need exactly one gold at gold_index") {
  Rng rng(4);
  RankingExample e = random_example(rng);
  e.candidates.push_back(random_span(rng, true));
  CHECK_THROWS_AS(validate(e), InvariantError);
}

TEST_CASE("rankings are sorted with ascending-index tie-break") {
  Ranking r = make_ranking("e", "m", {0.5, 2.0, 0.5, 2.0});
  CHECK(r.order == std::vector<std::size_t>{1, 3, 0, 2});
  r.order = {3, 1, 0, 2};
  CHECK_THROWS_AS(validate(r), InvariantError);
  Ranking nan = make_ranking("e", "m", {std::numeric_limits<double>::quiet_NaN()});
  CHECK_THROWS_AS(serialize_record(nan), InvariantError);
}

TEST_CASE("header line carries schema and kind") {
  CHECK(header_line(RecordKind::kLink) == R"({"schema":"linkforge/v1","kind":"link"})");
  CHECK(parse_header(header_line(RecordKind::kExample)) == RecordKind::kExample);
  CHECK_THROWS_AS(parse_header(R"({"schema":"linkforge/v0","kind":"link"})"), ParseError);
}

TEST_CASE("round trip property over 1000 randomized records of every type") {
  Rng rng(20231001);
  for (int i = 0; i < 1000; ++i) {
    check_round_trip(random_article(rng, "Article " + std::to_string(i)));
    LinkRecord link = random_link(rng);
    check_round_trip(link);
    // Offset integrity.
    CHECK(text::slice(link.context, link.mention_start, link.mention_end) == link.mention);
    CHECK(text::slice(link.context, link.sentence_start, link.sentence_end).find(link.mention) != std::string::npos);

    InsertionEvent ev{link, static_cast<InsertionScenario>(uniform_index(rng, 5)), "v1", "v2", hex64(rng()),
                      link.section_title, uniform_index(rng, 10)};
    check_round_trip(ev);
    check_round_trip(random_span(rng, uniform_index(rng, 2) == 1));
    RankingExample ex = random_example(rng);
    check_round_trip(ex);
    check_round_trip(AugmentedExample{ex, static_cast<RemovalStrategy>(uniform_index(rng, 4)), {{0, 3}, {5, 9}}});
    std::vector<double> scores;
    for (std::size_t k = 0; k < ex.candidates.size(); ++k) {
      scores.push_back(std::ldexp(static_cast<double>(rng() >> 11), -53) * 10 - 5);
    }
    check_round_trip(make_ranking(ex.example_id, "bm25", scores));
  }
}
