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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linkforge/corpus_model.hpp"

// Ranking metrics and their aggregation into Overall / Present / Missing
// buckets per language.
namespace linkforge::eval {

// 1 iff the gold is among the first k entries of ranking.order. Throws
// std::out_of_range for a gold index outside the ranking or k == 0.
int hits_at_k(const Ranking& ranking, std::size_t gold_index, std::size_t k);
// 1 / (1-based rank of the gold).
double mrr(const Ranking& ranking, std::size_t gold_index);

struct ExampleResult {
  std::string example_id;
  std::string lang;
  InsertionScenario scenario = InsertionScenario::kTextPresent;
  std::size_t rank = 0;
  double hits1 = 0;
  double rr = 0;
  std::optional<double> hits_k;
};

// Joins rankings with their examples by example_id. Throws
// DataError("missing ranking") / DataError("ranking size") when a ranking is
// absent or does not cover the example's candidates. Rankings for unknown
// examples are ignored. `k` adds Hits@k.
std::vector<ExampleResult> score_rankings(const std::vector<RankingExample>& examples,
                                          const std::vector<Ranking>& rankings, std::optional<std::size_t> k = {});

enum class Bucket { kOverall, kPresent, kMissing };
std::string_view to_string(Bucket bucket);

// Present = text_present; Missing = missing_mention, missing_sentence,
// missing_span. missing_section belongs to no bucket.
bool in_bucket(InsertionScenario scenario, Bucket bucket);

struct BucketMetrics {
  std::size_t n = 0;
  std::optional<double> hits1;  // null when n == 0
  std::optional<double> mrr;
  std::optional<double> hits_k;
};

struct LanguageRow {
  std::string lang;  // "macro" for the macro row
  BucketMetrics overall;
  BucketMetrics present;
  BucketMetrics missing;

  const BucketMetrics& bucket(Bucket b) const;
  BucketMetrics& bucket(Bucket b);
};

struct EvalReport {
  std::string method;
  std::optional<std::size_t> k;
  std::vector<LanguageRow> languages;  // sorted by lang
  // Unweighted mean over languages of each per-language micro value;
  // languages with an empty bucket do not take part in that bucket. n is
  // the total.
  LanguageRow macro;
};

EvalReport aggregate(const std::string& method, const std::vector<ExampleResult>& results,
                     std::optional<std::size_t> k = {});

enum class Metric { kHits1, kMrr };

inline constexpr std::size_t kDefaultBootstrapIterations = 10000;

// Two-sided paired bootstrap over examples on mean(metric_a - metric_b).
// Each iteration resamples with its own generator derived from (seed,
// iteration), so the value does not depend on `workers`. A resample counts as
// a flip when its difference is zero or has the opposite sign of the observed
// one; p = min(1, 2 * flips / iterations). An observed difference of zero
// gives p = 1. Throws DataError("misaligned results") unless both sides list
// the same example ids in the same order.
double paired_significance(const std::vector<ExampleResult>& a, const std::vector<ExampleResult>& b, Metric metric,
                           std::size_t iterations = kDefaultBootstrapIterations, std::uint64_t seed = 0,
                           std::size_t workers = 1);

struct Comparison {
  std::string method;
  std::string baseline;
  Bucket bucket = Bucket::kOverall;
  Metric metric = Metric::kHits1;
  double p = 1.0;
};

// Text table: one block per language plus macro; rows are methods, columns
// Hits@1 and MRR for Overall, Present and Missing. Methods with p < 0.05
// against the baseline on a cell are marked with '*'.
std::string format_table(const std::vector<EvalReport>& reports, const std::vector<Comparison>& comparisons = {});

// Header line plus one JSON object per (method, lang, bucket) and per
// comparison.
std::string format_ndjson(const std::vector<EvalReport>& reports, const std::vector<Comparison>& comparisons = {});

}  // namespace linkforge::eval
