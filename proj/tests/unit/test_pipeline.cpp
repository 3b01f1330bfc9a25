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

#include <string>
#include <vector>

#include "linkforge/errors.hpp"
#include "linkforge/ndjson.hpp"
#include "linkforge/pipeline.hpp"
#include "linkforge/run.hpp"
#include "linkforge/stats.hpp"
#include "support/temp_dir.hpp"

using namespace linkforge;
using linkforge::testing::read_text;
using linkforge::testing::TempDir;
using linkforge::testing::write_text;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(LINKFORGE_DATA) / "fixture_corpus";

// Config over the bundled corpus; `extra` lines are appended to [rank].
std::string fixture_config(const std::string& rank_extra = "", const std::string& snapshot_a = "") {
  std::string a = snapshot_a.empty() ? (kCorpus / "snapshot_a").string() : snapshot_a;
  return "[run]\nseed = 13\nworkers = 3\nout_dir = out\n"
         "[ingest]\nsnapshot_a = " + a + "\nsnapshot_b = " + (kCorpus / "snapshot_b").string() +
         "\n[diff]\nhistories = " + (kCorpus / "histories").string() +
         "\n[eval]\niterations = 200\n[rank]\n" + rank_extra;
}

const std::vector<std::string> kOutputs{
    "a.articles.ndjson",   "a.links.ndjson",         "b.articles.ndjson",       "b.links.ndjson",
    "added.events.ndjson", "before.articles.ndjson", "train.examples.ndjson",   "eval.examples.ndjson",
    "eval.missing_section.ndjson", "train.augmented.ndjson", "rankings.random.ndjson",
    "rankings.string_match.ndjson", "rankings.bm25.ndjson", "report.ndjson", "report.txt", "manifest.json"};

}  // namespace

TEST_CASE("scenario frequencies per language") {
  TempDir dir;
  run::RunConfig c = run::load_config((write_text(dir / "p.ini", fixture_config()), dir / "p.ini"));
  c.stages = {"ingest", "diff"};
  pipeline::set_logging(false);
  run::run_pipeline(c);
  auto events = read_records<InsertionEvent>(c.out_dir / "added.events.ndjson");
  REQUIRE(events.size() == 5);

  // Counts {text_present:3, missing_mention:1, missing_sentence:2, missing_span:1, missing_section:1}.
  std::vector<InsertionEvent> sample;
  for (const auto& e : events) {
    int copies = e.scenario == InsertionScenario::kTextPresent ? 3 : e.scenario == InsertionScenario::kMissingSentence ? 2 : 1;
    for (int i = 0; i < copies; ++i) sample.push_back(e);
  }
  write_records(dir / "sample.ndjson", sample);
  auto s = stats::corpus_stats(dir / "sample.ndjson");
  const auto& en = s.scenarios.at("en");
  auto freq = [&](InsertionScenario sc) { return static_cast<double>(en.at(sc)) / 8.0; };
  CHECK(freq(InsertionScenario::kTextPresent) == 0.375);
  CHECK(freq(InsertionScenario::kMissingMention) == 0.125);
  CHECK(freq(InsertionScenario::kMissingSentence) == 0.25);
  CHECK(freq(InsertionScenario::kMissingSpan) == 0.125);
  CHECK(freq(InsertionScenario::kMissingSection) == 0.125);
  std::string report = stats::format_stats(s);
  CHECK(report.find("en\ttext_present\t3\t0.375\n") != std::string::npos);
  CHECK(report.find("en\tmissing_section\t1\t0.125\n") != std::string::npos);
}

TEST_CASE("ccdf of candidate counts") {
  std::vector<std::size_t> d{2, 5, 5};
  CHECK(stats::ccdf(d, 4) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(stats::ccdf(d, 2) == 1.0);
  CHECK(stats::ccdf(d, 6) == 0.0);
  CHECK(stats::ccdf({}, 1) == 0.0);
  auto table = stats::ccdf_table(d);
  REQUIRE(table.size() == 2);
  CHECK(table[0] == std::pair<std::size_t, double>{2, 1.0});
  CHECK(table[1].first == 5);
  CHECK(table[1].second == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("stats of an empty file is empty") {
  TempDir dir;
  write_text(dir / "empty.ndjson", "");
  auto s = stats::corpus_stats(dir / "empty.ndjson");
  CHECK(s.scenarios.empty());
  CHECK(s.candidate_counts.empty());
  CHECK(stats::format_stats(s).empty());
}

TEST_CASE("full run writes every stage output and a manifest") {
  TempDir dir;
  write_text(dir / "p.ini", fixture_config());
  pipeline::set_logging(false);
  auto c = run::load_config(dir / "p.ini");
  auto result = run::run_pipeline(c);
  REQUIRE(result.stages.size() == 6);
  for (const auto& s : result.stages) CHECK_FALSE(s.cached);
  for (const auto& name : kOutputs) CHECK_MESSAGE(fs::exists(c.out_dir / name), name);
  CHECK(fs::exists(c.out_dir / "manifest.timing.json"));
  CHECK(read_records<RankingExample>(c.out_dir / "eval.examples.ndjson").size() == 4);
  CHECK(read_records<InsertionEvent>(c.out_dir / "eval.missing_section.ndjson").size() == 1);

  SUBCASE("rerun without changes skips every stage") {
    auto again = run::run_pipeline(c);
    for (const auto& s : again.stages) CHECK(s.cached);
    CHECK(read_text(c.out_dir / "manifest.json").find("\"cached\": true") != std::string::npos);
  }
  SUBCASE("changing a knob reruns from that stage on") {
    c.bm25.k1 = 1.2;
    auto again = run::run_pipeline(c);
    for (const auto& s : again.stages) CHECK(s.cached == (s.stage != "rank" && s.stage != "eval"));
  }
  SUBCASE("a damaged output reruns its stage") {
    write_text(c.out_dir / "train.augmented.ndjson", "");
    auto again = run::run_pipeline(c);
    for (const auto& s : again.stages) CHECK(s.cached == (s.stage != "augment"));
  }
}

TEST_CASE("runs are byte-identical across output dirs and worker counts") {
  TempDir one, two;
  write_text(one / "p.ini", fixture_config());
  write_text(two / "p.ini", fixture_config());
  pipeline::set_logging(false);
  auto c1 = run::load_config(one / "p.ini");
  auto c2 = run::load_config(two / "p.ini");
  c2.workers = 1;
  run::run_pipeline(c1);
  run::run_pipeline(c2);
  for (const auto& name : kOutputs) CHECK_MESSAGE(read_text(c1.out_dir / name) == read_text(c2.out_dir / name), name);
}

TEST_CASE("absent snapshot fails before any stage runs") {
  TempDir dir;
  write_text(dir / "p.ini", fixture_config("", (dir / "no_such_snapshot").string()));
  pipeline::set_logging(false);
  auto c = run::load_config(dir / "p.ini");
  try {
    run::run_pipeline(c);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(e.reason() == "missing input");
    CHECK(std::string(e.what()).find("no_such_snapshot") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(c.out_dir));
}

TEST_CASE("invalid configs are rejected") {
  TempDir dir;
  auto load = [&](const std::string& text) {
    write_text(dir / "c.ini", text);
    return run::load_config(dir / "c.ini");
  };
  CHECK_THROWS_AS(load("[run]\nsede = 1\n"), ConfigError);
  CHECK_THROWS_AS(load("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(load("[run]\nstages = ingest, train\n"), ConfigError);
  CHECK_THROWS_AS(load("[run]\nseed = -3\n"), ConfigError);
  CHECK_THROWS_AS(load("[rank]\nmethods = external\n"), ConfigError);
  CHECK_THROWS_AS(load("[rank]\nb = 2\n"), ConfigError);
  CHECK_THROWS_AS(load("[augment]\nweights = 0.5,0.5,0.5,0\n"), ConfigError);
  CHECK_THROWS_AS(load("[run\n"), ConfigError);
  auto c = load("[run]\nseed = 7\nstages = ingest\n[eval]\nk = 3\n");
  CHECK(c.seed == 7);
  CHECK(c.stages == std::vector<std::string>{"ingest"});
  CHECK(c.k == 3u);
  CHECK(c.out_dir == dir / "out");
}

TEST_CASE("a failing stage keeps earlier outputs and names itself in the manifest") {
  TempDir dir;
  write_text(dir / "p.ini", fixture_config(std::string("methods = bm25, external\nscorer_cmd = ") +
                                           LINKFORGE_ECHO_SCORER + " malformed\ntimeout_ms = 5000\n"));
  pipeline::set_logging(false);
  auto c = run::load_config(dir / "p.ini");
  CHECK_THROWS_AS(run::run_pipeline(c), ProtocolError);
  std::string manifest = read_text(c.out_dir / "manifest.json");
  CHECK(manifest.find("\"stage\": \"augment\"") != std::string::npos);
  CHECK(manifest.find("\"stage\": \"rank\"") == std::string::npos);
  CHECK(fs::exists(c.out_dir / "train.augmented.ndjson"));
  CHECK(fs::exists(c.out_dir / "rankings.bm25.ndjson"));
}

TEST_CASE("external scorer ranks through the pipeline") {
  TempDir dir;
  write_text(dir / "p.ini", fixture_config(std::string("methods = random, external\nscorer_cmd = ") +
                                           LINKFORGE_ECHO_SCORER + "\n"));
  pipeline::set_logging(false);
  auto c = run::load_config(dir / "p.ini");
  run::run_pipeline(c);
  auto rankings = read_records<Ranking>(c.out_dir / "rankings.external.ndjson");
  REQUIRE(rankings.size() == 4);
  CHECK(rankings[0].method.rfind("external:", 0) == 0);
  CHECK(read_text(c.out_dir / "report.txt").find(rankings[0].method) != std::string::npos);
}
