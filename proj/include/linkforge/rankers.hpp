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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "linkforge/corpus_model.hpp"

// Baseline rankers over the candidates of one example.
namespace linkforge::rankers {

// Scores are a uniformly random permutation of 0..D-1, drawn from a
// generator seeded by (seed, example_id).
Ranking rank_random(const RankingExample& example, std::uint64_t seed);

// 1 for candidates containing a previously used mention, else 0.
Ranking rank_string_match(const RankingExample& example);

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;

  // Throws std::invalid_argument unless k1 >= 0 and 0 <= b <= 1.
  void check() const;
};

// Term statistics over one example's candidates: the candidate set is the
// whole corpus.
class Bm25Index {
 public:
  explicit Bm25Index(const std::vector<CandidateSpan>& candidates, const std::set<std::string>* stopwords = nullptr);

  std::size_t size() const { return tf_.size(); }
  double avgdl() const { return avgdl_; }
  std::size_t length(std::size_t doc) const { return length_[doc]; }
  std::size_t df(const std::string& term) const;
  std::size_t tf(std::size_t doc, const std::string& term) const;
  double idf(const std::string& term) const;

  // Sum over distinct query terms of idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl)).
  std::vector<double> score(const std::vector<std::string>& query_terms, const Bm25Params& params) const;

 private:
  std::vector<std::map<std::string, std::size_t>> tf_;
  std::vector<std::size_t> length_;
  std::map<std::string, std::size_t> df_;
  double avgdl_ = 0;
};

// Folded word tokens of `text`, deduplicated in first-seen order, minus
// stopwords.
std::vector<std::string> query_terms(const std::string& text, const std::set<std::string>* stopwords = nullptr);

// Query is the target lead. An empty lead scores every candidate 0.
Ranking rank_bm25(const RankingExample& example, const Bm25Params& params = {},
                  const std::set<std::string>* stopwords = nullptr);

// One word per line; '#' comments. Words are folded.
std::set<std::string> load_stopwords(const std::string& path);

}  // namespace linkforge::rankers
