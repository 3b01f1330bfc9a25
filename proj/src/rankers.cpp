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

#include "linkforge/rankers.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "linkforge/errors.hpp"
#include "linkforge/mention_match.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/text.hpp"

namespace linkforge::rankers {

Ranking rank_random(const RankingExample& example, std::uint64_t seed) {
  Rng rng = record_rng(seed, example.example_id);
  std::vector<double> scores(example.candidates.size());
  std::iota(scores.begin(), scores.end(), 0.0);
  for (std::size_t i = scores.size(); i > 1; --i) std::swap(scores[i - 1], scores[uniform_index(rng, i)]);
  return make_ranking(example.example_id, "random", std::move(scores));
}

Ranking rank_string_match(const RankingExample& example) {
  MentionMatcher matcher(example.target.mentions);
  std::vector<double> scores;
  for (const auto& c : example.candidates) scores.push_back(matcher.matches(c.text) ? 1.0 : 0.0);
  return make_ranking(example.example_id, "string_match", std::move(scores));
}

void Bm25Params::check() const {
  if (!(k1 >= 0) || !std::isfinite(k1)) throw std::invalid_argument("bm25 k1 must be >= 0");
  if (!(b >= 0 && b <= 1)) throw std::invalid_argument("bm25 b must be in [0, 1]");
}

std::vector<std::string> query_terms(const std::string& text, const std::set<std::string>* stopwords) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& t : text::folded_tokens(text)) {
    if (stopwords && stopwords->count(t)) continue;
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

Bm25Index::Bm25Index(const std::vector<CandidateSpan>& candidates, const std::set<std::string>* stopwords) {
  std::size_t total = 0;
  for (const auto& c : candidates) {
    std::map<std::string, std::size_t> tf;
    std::size_t len = 0;
    for (auto& t : text::folded_tokens(c.text)) {
      if (stopwords && stopwords->count(t)) continue;
      ++tf[std::move(t)];
      ++len;
    }
    for (const auto& [term, count] : tf) ++df_[term];
    total += len;
    tf_.push_back(std::move(tf));
    length_.push_back(len);
  }
  avgdl_ = tf_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(tf_.size());
}

std::size_t Bm25Index::df(const std::string& term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

std::size_t Bm25Index::tf(std::size_t doc, const std::string& term) const {
  auto it = tf_[doc].find(term);
  return it == tf_[doc].end() ? 0 : it->second;
}

double Bm25Index::idf(const std::string& term) const {
  double n = static_cast<double>(size());
  double d = static_cast<double>(df(term));
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::vector<double> Bm25Index::score(const std::vector<std::string>& query, const Bm25Params& params) const {
  params.check();
  std::vector<double> scores(size(), 0.0);
  for (const auto& term : query) {
    if (df(term) == 0) continue;
    double w = idf(term);
    for (std::size_t doc = 0; doc < size(); ++doc) {
      double f = static_cast<double>(tf(doc, term));
      if (f == 0) continue;
      double norm = avgdl_ > 0 ? static_cast<double>(length_[doc]) / avgdl_ : 0.0;
      scores[doc] += w * f * (params.k1 + 1) / (f + params.k1 * (1 - params.b + params.b * norm));
    }
  }
  return scores;
}

Ranking rank_bm25(const RankingExample& example, const Bm25Params& params, const std::set<std::string>* stopwords) {
  Bm25Index index(example.candidates, stopwords);
  return make_ranking(example.example_id, "bm25", index.score(query_terms(example.target.lead, stopwords), params));
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("unreadable stopword list", path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto word = text::trim(std::string_view(line));
    if (word.empty() || word[0] == '#') continue;
    out.insert(text::fold(word));
  }
  return out;
}

}  // namespace linkforge::rankers
