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
#include <utility>
#include <vector>

#include "linkforge/corpus_model.hpp"

// Corpus statistics: insertion-scenario frequencies per language and the
// distribution of candidate counts per article.
namespace linkforge::stats {

struct CorpusStats {
  // lang -> scenario -> count. Filled from events and examples.
  std::map<std::string, std::map<InsertionScenario, std::size_t>> scenarios;
  // One value per article (sentence count) or example (candidate count).
  std::vector<std::size_t> candidate_counts;
};

// Accepts article, event and example files; other kinds and empty files
// give empty statistics.
CorpusStats corpus_stats(const std::filesystem::path& path);

// Fraction of values >= x. Zero for an empty list.
double ccdf(const std::vector<std::size_t>& values, std::size_t x);
// (x, ccdf(x)) for every distinct value, ascending.
std::vector<std::pair<std::size_t, double>> ccdf_table(const std::vector<std::size_t>& values);

// Tab-separated tables; empty statistics give an empty string.
std::string format_stats(const CorpusStats& stats);

}  // namespace linkforge::stats
