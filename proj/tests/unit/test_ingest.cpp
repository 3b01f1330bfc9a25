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

#include <fstream>
#include <sstream>

#include "linkforge/errors.hpp"
#include "linkforge/ingest.hpp"
#include "linkforge/text.hpp"

using namespace linkforge;
using namespace linkforge::ingest;

namespace {

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    auto at = s.find(sep, pos);
    out.push_back(s.substr(pos, at - pos));
    if (at == std::string::npos) break;
    pos = at + sep.size();
  }
  return out;
}

std::string unescape_newlines(std::string s) {
  for (std::size_t p; (p = s.find("\\n")) != std::string::npos;) s.replace(p, 2, "\n");
  return s;
}

ParsedArticle parse(const std::string& markup, const std::string& snapshot = "s1") {
  return parse_article(make_raw_article(markup, snapshot));
}

const char* kBrie = R"(<article title="Brie" qid="Q1" lang="en">
  <p>Brie is a soft <a href="qid:Q3">cheese</a>. It comes from France.</p>
  <section title="Serving">
    <p>Serve soft. It is best eaten when it is somewhat below normal <a href="qid:Q2">room temperature</a>.</p>
    <figure><p>A wedge of <a href="qid:Q4">Brie</a>.</p></figure>
    <p>See <a href="qid:Q1">Brie</a> and <a href="qid:Q99">nothing</a>.</p>
  </section>
</article>)";

TargetIndex brie_targets() {
  return {{"Q1", {"Brie", "Brie is a cheese."}},
          {"Q2", {"Room temperature", "Room temperature is comfortable."}},
          {"Q3", {"Cheese", "Cheese is a dairy product."}},
          {"Q4", {"Wedge", "A wedge is a shape."}}};
}

}  // namespace

TEST_CASE("segmentation matches the hand-applied rule fixture") {
  std::ifstream in(std::string(LINKFORGE_FIXTURES) + "/segmentation_cases.tsv");
  REQUIRE(in);
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, "\t");
    REQUIRE(cols.size() == 4);
    AbbreviationTable table;
    if (!cols[1].empty()) {
      for (const auto& a : split(cols[1], ",")) table.add(cols[0], a);
    }
    std::string input = unescape_newlines(cols[2]);
    auto sentences = segment_sentences(input, cols[0], table);
    std::vector<std::string> got;
    for (const auto& s : sentences) {
      got.push_back(s.text);
      CHECK(text::slice(input, s.start, s.end) == s.text);
    }
    INFO("input: " << input);
    CHECK(got == split(cols[3], " | "));
    ++cases;
  }
  CHECK(cases >= 20);
}

TEST_CASE("builtin abbreviation table covers shared and per-language entries") {
  const auto& table = AbbreviationTable::builtin();
  CHECK(table.contains("en", "e.g."));
  CHECK(table.contains("fi", "e.g."));
  CHECK(table.contains("en", "Mr."));
  CHECK_FALSE(table.contains("en", "cheese."));
  auto s = segment_sentences("Soft cheeses, e.g. Brie, are runny. Hard ones are not.", "en");
  CHECK(s.size() == 2);
}

TEST_CASE("abbreviation table rejects lines without a tab") {
  CHECK_THROWS_AS(AbbreviationTable::parse("en Mr."), ParseError);
  auto t = AbbreviationTable::parse("# comment\n\nen\tMr.\n");
  CHECK(t.contains("en", "Mr."));
}

TEST_CASE("parse_article builds lead and titled sections") {
  ParsedArticle p = parse(kBrie);
  CHECK_FALSE(p.rejection);
  const ArticleRecord& a = p.record;
  CHECK(a.qid == "Q1");
  CHECK(a.lead == "Brie is a soft cheese. It comes from France.");
  REQUIRE(a.sections.size() == 2);
  CHECK(a.sections[0].title.empty());
  CHECK(a.sections[1].title == "Serving");
  CHECK(a.sections[1].text ==
        "Serve soft. It is best eaten when it is somewhat below normal room temperature.\nSee Brie and nothing.");
  CHECK(a.sections[1].sentences.size() == 3);
  CHECK(a.article_id == make_article_id("en", "Brie", "s1"));
  validate(a);
  // Figure content is dropped, so its anchor is not recorded.
  CHECK(p.anchors.size() == 4);
}

TEST_CASE("extract_links drops self-links, unknown targets and non-body links") {
  ParsedArticle p = parse(kBrie);
  ExtractStats stats;
  auto links = extract_links(p, brie_targets(), kDefaultContextWindow, &stats);
  CHECK(stats.emitted == 2);
  CHECK(stats.self_links == 1);
  CHECK(stats.unknown_targets == 1);
  REQUIRE(links.size() == 2);
  CHECK(links[0].tgt_qid == "Q3");
  CHECK(links[0].section_title.empty());
  const LinkRecord& rt = links[1];
  CHECK(rt.tgt_qid == "Q2");
  CHECK(rt.section_title == "Serving");
  CHECK(rt.context ==
        "Serve soft. It is best eaten when it is somewhat below normal room temperature.\nSee Brie and nothing.");
  CHECK(rt.mention == "room temperature");
  CHECK(rt.mention_start == 62);
  CHECK(rt.mention_end == 78);
  CHECK(rt.sentence_start == 12);
  CHECK(rt.sentence_end == 79);
  for (const auto& l : links) validate(l);
}

TEST_CASE("context window clips to the section") {
  std::string body;
  for (int i = 0; i < 12; ++i) {
    body += "Sentence " + std::to_string(i) + (i == 6 ? " has a <a href=\"qid:Q2\">link</a>." : " is plain.") + " ";
  }
  std::string markup = "<article title=\"T\" qid=\"Q1\"><p>Lead here.</p><section title=\"Body\"><p>" + body +
                       "</p></section></article>";
  ParsedArticle p = parse(markup);
  TargetIndex targets{{"Q2", {"Link", "A link."}}};
  auto wide = extract_links(p, targets, 5);
  REQUIRE(wide.size() == 1);
  CHECK(wide[0].context.rfind("Sentence 1 ", 0) == 0);
  CHECK(wide[0].context.find("Sentence 11 is plain.") != std::string::npos);
  auto narrow = extract_links(p, targets, 1);
  CHECK(narrow[0].context == "Sentence 5 is plain. Sentence 6 has a link. Sentence 7 is plain.");
  CHECK(narrow[0].sentence_start == 21);
}

TEST_CASE("anchors spanning sentences extend the sentence range") {
  std::string markup =
      "<article title=\"T\" qid=\"Q1\"><p>Start here. It says <a href=\"qid:Q2\">one. Then two</a> more. End.</p>"
      "</article>";
  auto links = extract_links(parse(markup), {{"Q2", {"X", "X is."}}}, 0);
  REQUIRE(links.size() == 1);
  CHECK(links[0].context == "It says one. Then two more.");
  CHECK(links[0].sentence_start == 0);
  CHECK(links[0].sentence_end == 27);
}

TEST_CASE("articles without lead or qid are rejected") {
  CHECK(parse("<article title=\"T\"><p>Lead.</p></article>").rejection == "no qid");
  CHECK(parse("<article title=\"T\" qid=\"Q1\"><section title=\"A\"><p>Body.</p></section></article>").rejection ==
        "no lead");
  CHECK(parse("<article title=\"T\" qid=\"Q1\"></article>").rejection == "no lead");
}

TEST_CASE("entities, comments and whitespace") {
  ParsedArticle p = parse(
      "<article title=\"T\" qid=\"Q1\"><!-- note --><p>  Fish   &amp; chips\n  &#233;t&#xE9;. </p></article>");
  CHECK(p.record.lead == "Fish & chips été.");
}

TEST_CASE("empty anchors are counted and skipped") {
  ParsedArticle p = parse("<article title=\"T\" qid=\"Q1\"><p>Lead <a href=\"qid:Q2\"></a>text.</p></article>");
  CHECK(p.empty_anchors == 1);
  CHECK(p.anchors.empty());
}

TEST_CASE("malformed markup reports line and column") {
  for (const char* bad : {"<article title=\"T\"><p>unclosed</article>", "<article><p>x</p>",
                          "<article>stray text</article>", "<article><p>a &bogus; b</p></article>",
                          "<article><p>a</p></article><p>after</p>"}) {
    INFO(bad);
    try {
      parse(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(':') != std::string::npos);
    }
  }
}
