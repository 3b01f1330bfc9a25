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
#include <fstream>
#include <set>
#include <json.hpp>

#include "linkforge/errors.hpp"
#include "linkforge/rankers.hpp"
#include "linkforge/scorer.hpp"
#include "linkforge/text.hpp"
#include "support/builders.hpp"

using namespace linkforge;
using namespace linkforge::rankers;

namespace {

RankingExample example_of(const std::vector<std::string>& texts, std::size_t gold = 0, std::string lead = "",
                          std::vector<std::string> mentions = {}, std::string id = "ex") {
  RankingExample ex;
  ex.example_id = std::move(id);
  ex.target = {"Target", std::move(lead), std::move(mentions)};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    CandidateSpan c;
    c.article_id = "a";
    c.anchor_index = i;
    c.section_title = "S";
    c.text = texts[i];
    c.is_gold = i == gold;
    ex.candidates.push_back(c);
  }
  ex.gold_index = gold;
  ex.lang = "en";
  return ex;
}

std::size_t rank_of(const Ranking& r, std::size_t candidate) {
  return static_cast<std::size_t>(std::find(r.order.begin(), r.order.end(), candidate) - r.order.begin()) + 1;
}

std::string scorer_cmd(const std::string& mode) { return std::string(LINKFORGE_ECHO_SCORER) + " " + mode; }

}  // namespace

TEST_CASE("random ranker is a seeded permutation") {
  auto single = example_of({"only"});
  CHECK(rank_random(single, 1).order == std::vector<std::size_t>{0});
  auto ex = example_of({"a", "b", "c", "d", "e"});
  auto r = rank_random(ex, 13);
  CHECK(r == rank_random(ex, 13));
  std::vector<double> sorted = r.scores;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<double>{0, 1, 2, 3, 4});
  validate(r);
}

TEST_CASE("random ranker places the gold uniformly (chi-square)") {
  const int trials = 100000;
  const std::size_t d = 10;
  std::vector<std::string> texts(d, "x");
  auto ex = example_of(texts, 3);
  std::vector<int> counts(d, 0);
  for (int t = 0; t < trials; ++t) {
    ex.example_id = "ex-" + std::to_string(t);
    ++counts[rank_of(rank_random(ex, 13), 3) - 1];
  }
  double expected = trials / static_cast<double>(d);
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Critical value of chi-square with 9 degrees of freedom at p = 0.01.
  CHECK(chi2 < 21.666);
}

TEST_CASE("string match ranks mention-containing candidates first") {
  auto ex = example_of({"Helsinki is big.", "Kivi was born in Nurmijärvi.", "Nothing here."}, 1, "", {"Nurmijärvi"});
  auto r = rank_string_match(ex);
  CHECK(r.order == std::vector<std::size_t>{1, 0, 2});
  CHECK(rank_string_match(example_of({"a", "b", "c"}, 0, "", {"zzz"})).order == std::vector<std::size_t>{0, 1, 2});
  CHECK(rank_string_match(example_of({"a", "b", "c"})).order == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("string match tiers hold over random inputs") {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::string> texts;
    std::vector<bool> has;
    for (int i = 0; i < 8; ++i) {
      bool with = uniform_index(rng, 3) == 0;
      texts.push_back(linkforge::testing::random_sentence(rng) + (with ? " The Needle word." : ""));
      has.push_back(with);
    }
    auto r = rank_string_match(example_of(texts, 0, "", {"needle"}));
    bool seen_without = false;
    for (std::size_t idx : r.order) {
      if (!has[idx]) seen_without = true;
      if (has[idx]) CHECK_FALSE(seen_without);
    }
  }
}

TEST_CASE("bm25 matches the committed hand-computed fixture") {
  std::ifstream in(std::string(LINKFORGE_FIXTURES) + "/bm25_fixture.json");
  REQUIRE(in);
  auto fx = nlohmann::json::parse(in);
  auto ex = example_of(fx["candidates"].get<std::vector<std::string>>(), 0, fx["query"]);
  Bm25Params params{fx["k1"], fx["b"]};
  auto r = rank_bm25(ex, params);
  auto expected = fx["expected_scores"].get<std::vector<double>>();
  REQUIRE(r.scores.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::fabs(r.scores[i] - expected[i]) <= 1e-9);
  CHECK(r.order == fx["expected_order"].get<std::vector<std::size_t>>());
}

TEST_CASE("bm25 index statistics") {
  auto ex = example_of({"one two three", "one two", "one"});
  Bm25Index index(ex.candidates);
  CHECK(index.avgdl() == doctest::Approx(2.0));
  CHECK(index.df("one") == 3);
  CHECK(index.df("absent") == 0);
  CHECK(index.idf("absent") == doctest::Approx(std::log(1 + 3.5 / 0.5)));
  CHECK(index.tf(0, "two") == 1);
  Bm25Index again(example_of({"one two", "one two"}).candidates);
  CHECK(again.tf(0, "one") == again.tf(1, "one"));
}

TEST_CASE("bm25 single discriminative term wins") {
  auto r = rank_bm25(example_of({"alpha beta", "alpha gamma", "alpha beta"}, 0, "gamma"));
  CHECK(r.order[0] == 1);
}

TEST_CASE("bm25 with b = 0 ignores document length") {
  auto base = example_of({"cheese is soft", "cheese from france", "wine"}, 0, "soft cheese france");
  auto padded = base;
  padded.candidates[0].text += " lorem ipsum dolor sit amet consectetur";
  Bm25Params flat{1.5, 0.0};
  auto a = rank_bm25(base, flat);
  auto b = rank_bm25(padded, flat);
  // Padding adds no query terms, so df and idf are unchanged.
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-12));
  CHECK(rank_bm25(base).scores[0] != doctest::Approx(rank_bm25(padded).scores[0]));
}

TEST_CASE("bm25 empty lead scores zero") {
  auto r = rank_bm25(example_of({"a b", "c d"}, 0, ""));
  CHECK(r.scores == std::vector<double>{0, 0});
  CHECK(r.order == std::vector<std::size_t>{0, 1});
}

TEST_CASE("bm25 parameter validation") {
  CHECK_THROWS_AS((Bm25Params{-1, 0.5}.check()), std::invalid_argument);
  CHECK_THROWS_AS((Bm25Params{1, 1.5}.check()), std::invalid_argument);
  Bm25Params{0, 1}.check();
}

TEST_CASE("bm25 query duplication, order invariance and monotonicity") {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::string> texts;
    for (int i = 0; i < 6; ++i) texts.push_back(linkforge::testing::random_sentence(rng));
    std::string lead = linkforge::testing::random_sentence(rng) + " " + texts[uniform_index(rng, 6)];
    auto ex = example_of(texts, 0, lead);
    auto r = rank_bm25(ex);
    auto dup = ex;
    dup.target.lead = lead + " " + lead;
    CHECK(rank_bm25(dup).scores == r.scores);

    // Shuffle candidates; each candidate keeps its score.
    std::vector<std::size_t> perm{0, 1, 2, 3, 4, 5};
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    auto shuffled = ex;
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled.candidates[i] = ex.candidates[perm[i]];
    auto rs = rank_bm25(shuffled);
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(rs.scores[i] == doctest::Approx(r.scores[perm[i]]).epsilon(1e-12));

    // With b = 0, one more occurrence of a query term the candidate already
    // holds never lowers its score.
    std::size_t c = uniform_index(rng, 6);
    auto own = query_terms(ex.candidates[c].text);
    auto lead_terms = query_terms(lead);
    std::vector<std::string> shared;
    for (const auto& t : own) {
      if (std::find(lead_terms.begin(), lead_terms.end(), t) != lead_terms.end()) shared.push_back(t);
    }
    if (shared.empty()) continue;
    auto grown = ex;
    grown.candidates[c].text += " " + shared[uniform_index(rng, shared.size())];
    Bm25Params flat{1.5, 0.0};
    CHECK(rank_bm25(grown, flat).scores[c] >= rank_bm25(ex, flat).scores[c] - 1e-12);
  }
}

TEST_CASE("bm25 monotonicity does not hold once length normalization is on") {
  // Adding "beta" lengthens candidate 0, which shrinks the weight of the
  // rarer "alpha" by more than "beta" gains.
  auto ex = example_of({"alpha beta", "beta gamma", "beta delta", "beta epsilon"}, 0, "alpha beta");
  auto grown = ex;
  grown.candidates[0].text += " beta";
  CHECK(rank_bm25(grown).scores[0] < rank_bm25(ex).scores[0]);
}

TEST_CASE("bm25 stopwords are dropped from query and documents") {
  std::set<std::string> stop{"the", "is"};
  auto ex = example_of({"the the the the cat", "dog is here"}, 0, "The cat is");
  auto r = rank_bm25(ex, {}, &stop);
  CHECK(r.scores[1] == 0.0);
  CHECK(query_terms("The cat is the", &stop) == std::vector<std::string>{"cat"});
}

TEST_CASE("ranking permutation consistency on tie-free inputs") {
  auto ex = example_of({"alpha alpha beta", "alpha", "gamma delta", "gamma gamma"}, 0, "alpha gamma");
  auto r = rank_bm25(ex);
  std::set<double> distinct(r.scores.begin(), r.scores.end());
  REQUIRE(distinct.size() == r.scores.size());
  auto rev = ex;
  std::reverse(rev.candidates.begin(), rev.candidates.end());
  auto rr = rank_bm25(rev);
  for (std::size_t i = 0; i < r.order.size(); ++i) CHECK(rr.order[i] == 3 - r.order[i]);
}

TEST_CASE("external scorer: echo returns reverse index order") {
  ExternalScorer scorer({scorer_cmd("echo"), std::chrono::milliseconds(5000)});
  auto r = rank_external(example_of({"a", "b", "c", "d"}), scorer);
  CHECK(r.order == std::vector<std::size_t>{3, 2, 1, 0});
  CHECK(scorer.name() == "echo");
  CHECK(r.method == "external:echo");
}

TEST_CASE("external scorer: contract violations are protocol errors") {
  auto ex = example_of({"a", "b", "c"});
  {
    ExternalScorer scorer({scorer_cmd("short"), std::chrono::milliseconds(5000)});
    try {
      scorer.score(ex);
      FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
      CHECK(std::string(e.what()).find("expected 3, got 2") != std::string::npos);
    }
  }
  for (const char* mode : {"nan", "null"}) {
    ExternalScorer scorer({scorer_cmd(mode), std::chrono::milliseconds(5000)});
    try {
      scorer.score(ex);
      FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
      CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    }
  }
  for (const char* mode : {"wrong_id", "malformed", "exit:1", "bad_handshake"}) {
    INFO(mode);
    ExternalScorer scorer({scorer_cmd(mode), std::chrono::milliseconds(5000)});
    CHECK_THROWS_AS(scorer.score(ex), ProtocolError);
    CHECK_FALSE(scorer.running());
  }
  ExternalScorer missing({"/nonexistent/scorer", std::chrono::milliseconds(5000)});
  CHECK_THROWS_AS(missing.score(ex), ProtocolError);
}

TEST_CASE("external scorer: timeout fails the example and restarts") {
  ExternalScorer scorer({scorer_cmd("hang:2"), std::chrono::milliseconds(300)});
  auto ex = example_of({"a", "b"});
  CHECK(scorer.score(ex) == std::vector<double>{0, 1});
  CHECK_THROWS_AS(scorer.score(ex), TimeoutError);
  CHECK_FALSE(scorer.running());
  CHECK(scorer.score(ex) == std::vector<double>{0, 1});
  CHECK(scorer.restarts() == 1);
}

TEST_CASE("parse_score_reply validates replies") {
  CHECK(parse_score_reply(R"({"type":"scores","example_id":"e","scores":[1.5,-2]})", "e", 2) ==
        std::vector<double>{1.5, -2});
  CHECK_THROWS_AS(parse_score_reply(R"({"type":"scores","example_id":"e","scores":[1e999]})", "e", 1),
                  ProtocolError);
  CHECK_THROWS_AS(parse_score_reply(R"({"type":"scores","example_id":"e","scores":["1"]})", "e", 1), ProtocolError);
  CHECK_THROWS_AS(parse_score_reply(R"({"type":"other"})", "e", 1), ProtocolError);
  auto req = nlohmann::json::parse(score_request(example_of({"x"}, 0, "lead", {"m"})));
  CHECK(req["type"] == "score");
  CHECK(req["target"]["mentions"][0] == "m");
  CHECK(req["candidates"][0]["section"] == "S");
}
