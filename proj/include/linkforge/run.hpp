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
#include <optional>
#include <string>
#include <vector>

#include "linkforge/augment.hpp"
#include "linkforge/rankers.hpp"
#include "linkforge/snapshot_diff.hpp"

// Declarative end-to-end runs. A run reads one INI file:
//
//   [run]        seed, workers, out_dir, stages (comma list)
//   [ingest]     snapshot_a, snapshot_b, lang, window
//   [diff]       histories, jaccard_threshold, max_trim_tokens
//   [candidates] negatives, window
//   [augment]    weights, epoch
//   [rank]       methods (comma list), scorer_cmd, timeout_ms, k1, b, stopwords
//   [eval]       k, iterations
//
// Relative paths resolve against the config file's directory. Every key is
// optional except the snapshot and history paths needed by the declared
// stages.
namespace linkforge::run {

namespace fs = std::filesystem;

inline const std::vector<std::string> kStages{"ingest", "diff", "candidates", "augment", "rank", "eval"};

struct RunConfig {
  fs::path base_dir;
  fs::path out_dir = "out";
  std::uint64_t seed = 13;
  std::size_t workers = 1;
  std::vector<std::string> stages = kStages;

  fs::path snapshot_a;
  fs::path snapshot_b;
  std::string lang = "en";
  std::size_t context_window = 5;

  fs::path histories;
  diff::ClassifyOptions classify;

  std::size_t negatives = 9;
  std::size_t window = 5;

  augment::RemovalWeights weights;
  std::uint64_t epoch = 0;

  std::vector<std::string> methods{"random", "string_match", "bm25"};
  std::string scorer_cmd;
  std::chrono::milliseconds timeout{60000};
  rankers::Bm25Params bm25;
  std::optional<fs::path> stopwords;

  std::optional<std::size_t> k;
  std::size_t iterations = 1000;
};

// Throws ConfigError for unreadable files, unknown sections, keys or
// stages and malformed values.
RunConfig load_config(const fs::path& path);

struct StageRecord {
  std::string stage;
  bool cached = false;
  double seconds = 0;
};

struct RunResult {
  std::vector<StageRecord> stages;
  fs::path manifest;
};

// Runs the declared stages in pipeline order. All inputs are checked before
// the first stage starts (DataError "missing input" naming the path). A
// stage whose inputs, parameters and outputs match the previous manifest is
// skipped and marked cached. Writes manifest.json (deterministic) and
// manifest.timing.json (durations) into out_dir, also after a failing
// stage, which is then rethrown.
RunResult run_pipeline(const RunConfig& config);

}  // namespace linkforge::run
