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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkforge/augment.hpp"
#include "linkforge/candidate_gen.hpp"
#include "linkforge/rankers.hpp"
#include "linkforge/snapshot_diff.hpp"

// File-to-file drivers for each pipeline stage. Every driver reads and
// writes NDJSON files, fans out over records on `workers` threads and keeps
// input order in its output, so results do not depend on the worker count.
namespace linkforge::pipeline {

namespace fs = std::filesystem;

// Structured log line on stderr: "stage=<stage> event=<event> k=v ...".
void log(std::string_view stage, std::string_view event,
         std::initializer_list<std::pair<std::string_view, std::string>> fields = {});
void set_logging(bool enabled);

struct IngestOptions {
  std::string snapshot;
  std::string default_lang = "en";
  std::size_t window = ingest::kDefaultContextWindow;
  std::size_t workers = 1;
};

struct IngestSummary {
  std::size_t files = 0;
  std::size_t articles = 0;
  std::size_t rejected = 0;
  ingest::ExtractStats links;
};

// Parses every *.xml file under `in` (sorted by name). Accepted articles of
// one language form that language's target index.
IngestSummary ingest_dir(const fs::path& in, const fs::path& articles_out, const fs::path& links_out,
                         const IngestOptions& options);

struct DiffOptions {
  fs::path histories;
  std::string default_lang = "en";
  std::size_t window = ingest::kDefaultContextWindow;
  diff::ClassifyOptions classify;
  std::size_t workers = 1;
};

struct DiffSummary {
  std::size_t added = 0;
  std::size_t events = 0;
  std::size_t no_history = 0;
  std::size_t not_localizable = 0;
  std::size_t unclassified = 0;
};

// Events for links of `b_links` absent from `a_links`, ordered by pair.
// `before_articles_out` receives the before-version articles the events
// point at.
DiffSummary diff_snapshots(const fs::path& a_links, const fs::path& b_links, const fs::path& events_out,
                           const std::optional<fs::path>& before_articles_out, const DiffOptions& options);

struct CandidateOptions {
  candidates::ExampleOptions example;
  // Previously used mentions; without it targets carry no mentions.
  std::optional<fs::path> mentions;
  std::size_t workers = 1;
};

struct CandidateSummary {
  std::size_t examples = 0;
  std::size_t missing_section = 0;
  std::size_t unresolvable = 0;
};

// Examples from added-link events. missing_section events produce no
// example; they go to `side_out` when given.
CandidateSummary candidates_from_events(const fs::path& events, const fs::path& articles, const fs::path& out,
                                        const std::optional<fs::path>& side_out, const CandidateOptions& options);

// Training examples from the existing links of `articles`.
CandidateSummary candidates_from_links(const fs::path& links, const fs::path& articles, const fs::path& out,
                                       const CandidateOptions& options);

struct AugmentOptions {
  augment::RemovalWeights weights;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::size_t workers = 1;
};

std::size_t augment_file(const fs::path& in, const fs::path& out, const AugmentOptions& options);

struct RankOptions {
  std::string method;  // random, string_match, bm25 or external
  std::uint64_t seed = 0;
  rankers::Bm25Params bm25;
  std::optional<fs::path> stopwords;
  std::string scorer_cmd;
  std::chrono::milliseconds timeout{60000};
  std::size_t workers = 1;
};

struct RankSummary {
  std::size_t ranked = 0;
  // Examples the external scorer failed on, with the error text.
  std::vector<std::pair<std::string, std::string>> failed;
  std::string method;  // as written in the rankings
};

// Throws ConfigError for an unknown method or external without a command.
RankSummary rank_file(const fs::path& in, const fs::path& out, const RankOptions& options);

struct EvalOptions {
  std::optional<std::size_t> k;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct EvalOutput {
  std::string table;
  std::string ndjson;
};

// One report per rankings file. Every later method is compared with the
// first one on each bucket and metric.
EvalOutput evaluate_files(const std::vector<fs::path>& rankings, const fs::path& examples,
                          const EvalOptions& options);

}  // namespace linkforge::pipeline
