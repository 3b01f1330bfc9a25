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

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "support/temp_dir.hpp"

using linkforge::testing::read_text;
using linkforge::testing::TempDir;
using linkforge::testing::write_text;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(LINKFORGE_DATA) / "fixture_corpus";

// Exit status of `linkforge <args>`, with stdout and stderr sent to `log`.
int cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(LINKFORGE_CLI) + " " + args + " >" + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("usage errors exit 1") {
  TempDir dir;
  CHECK(cli("", dir / "log") == 1);
  CHECK(cli("frobnicate", dir / "log") == 1);
  CHECK(cli("rank --method nope --in x --out y", dir / "log") == 1);
  CHECK(cli("run", dir / "log") == 1);
  CHECK(cli("--help", dir / "log") == 0);
}

TEST_CASE("data errors exit 2 and name the path") {
  TempDir dir;
  CHECK(cli("ingest --snapshot a --in " + q(dir / "absent") + " --out " + q(dir / "a.ndjson") + " --links " +
                q(dir / "l.ndjson"),
            dir / "log") == 2);
  CHECK(read_text(dir / "log").find("absent") != std::string::npos);
  write_text(dir / "bad.ndjson", "{\"schema\":\"linkforge/v1\",\"kind\":\"example\"}\n{not json\n");
  CHECK(cli("rank --method bm25 --in " + q(dir / "bad.ndjson") + " --out " + q(dir / "r.ndjson"), dir / "log") == 2);
  CHECK(read_text(dir / "log").find("bad.ndjson:2") != std::string::npos);
}

TEST_CASE("subcommands chained by hand reproduce the run outputs") {
  TempDir dir;
  const auto log = dir / "log";
  const std::string g = "--quiet --seed 13 --workers 2 ";
  const auto o = [&](const std::string& n) { return q(dir / "steps" / n); };
  fs::create_directories(dir / "steps");

  REQUIRE(cli(g + "--config " + q(kCorpus / "pipeline.ini") + " run --out-dir " + q(dir / "run"), log) == 0);

  REQUIRE(cli(g + "ingest --snapshot a --in " + q(kCorpus / "snapshot_a") + " --out " + o("a.articles.ndjson") +
                  " --links " + o("a.links.ndjson"), log) == 0);
  REQUIRE(cli(g + "ingest --snapshot b --in " + q(kCorpus / "snapshot_b") + " --out " + o("b.articles.ndjson") +
                  " --links " + o("b.links.ndjson"), log) == 0);
  REQUIRE(cli(g + "diff --snap-a " + o("a.links.ndjson") + " --snap-b " + o("b.links.ndjson") + " --histories " +
                  q(kCorpus / "histories") + " --out " + o("added.events.ndjson") + " --before-articles " +
                  o("before.articles.ndjson"), log) == 0);
  REQUIRE(cli(g + "candidates --existing-links " + o("a.links.ndjson") + " --articles " + o("a.articles.ndjson") +
                  " --mentions " + o("a.links.ndjson") + " --mode train --negatives 9 --window 5 --out " +
                  o("train.examples.ndjson"), log) == 0);
  REQUIRE(cli(g + "candidates --events " + o("added.events.ndjson") + " --articles " + o("before.articles.ndjson") +
                  " --mentions " + o("a.links.ndjson") + " --mode eval --out " + o("eval.examples.ndjson") +
                  " --missing-section-out " + o("eval.missing_section.ndjson"), log) == 0);
  REQUIRE(cli(g + "augment --in " + o("train.examples.ndjson") + " --weights 0.4,0.2,0.3,0.1 --out " +
                  o("train.augmented.ndjson"), log) == 0);
  for (std::string m : {"random", "string_match", "bm25"}) {
    REQUIRE(cli(g + "rank --method " + m + " --in " + o("eval.examples.ndjson") + " --out " +
                    o("rankings." + m + ".ndjson"), log) == 0);
  }
  const std::string rankings = " --rankings " + o("rankings.random.ndjson") + " --rankings " +
                               o("rankings.string_match.ndjson") + " --rankings " + o("rankings.bm25.ndjson");
  REQUIRE(cli(g + "eval --iterations 1000" + rankings + " --examples " + o("eval.examples.ndjson") +
                  " --format ndjson --out " + o("report.ndjson"), log) == 0);
  REQUIRE(cli(g + "eval --iterations 1000" + rankings + " --examples " + o("eval.examples.ndjson") +
                  " --format table --out " + o("report.txt"), log) == 0);

  for (const char* name : {"a.articles.ndjson", "a.links.ndjson", "b.links.ndjson", "added.events.ndjson",
                           "before.articles.ndjson", "train.examples.ndjson", "eval.examples.ndjson",
                           "eval.missing_section.ndjson", "train.augmented.ndjson", "rankings.random.ndjson",
                           "rankings.bm25.ndjson", "report.ndjson", "report.txt"}) {
    CHECK_MESSAGE(read_text(dir / "steps" / name) == read_text(dir / "run" / name), name);
  }

  SUBCASE("stats over examples and an empty file") {
    REQUIRE(cli("stats --in " + o("eval.examples.ndjson"), log) == 0);
    CHECK(read_text(log).find("candidates\tccdf") != std::string::npos);
    write_text(dir / "empty.ndjson", "");
    REQUIRE(cli("stats --in " + q(dir / "empty.ndjson"), log) == 0);
    CHECK(read_text(log).empty());
  }
  SUBCASE("scorer protocol errors exit 3") {
    CHECK(cli(g + "rank --method external --scorer-cmd '" + std::string(LINKFORGE_ECHO_SCORER) + " short' --in " +
                  o("eval.examples.ndjson") + " --out " + o("ext.ndjson"), log) == 3);
    CHECK(cli(g + "rank --method external --scorer-cmd '" + std::string(LINKFORGE_ECHO_SCORER) +
                  " hang:2' --timeout-ms 200 --in " + o("eval.examples.ndjson") + " --out " + o("ext.ndjson"),
              log) == 3);
    CHECK(cli(g + "rank --method external --scorer-cmd '" + std::string(LINKFORGE_ECHO_SCORER) + "' --in " +
                  o("eval.examples.ndjson") + " --out " + o("ext.ndjson"), log) == 0);
  }
}
