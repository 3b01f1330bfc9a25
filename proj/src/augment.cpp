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

#include "linkforge/augment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "linkforge/hash.hpp"
#include "linkforge/mention_match.hpp"
#include "linkforge/text.hpp"

namespace linkforge::augment {
namespace {

using Range = std::pair<std::size_t, std::size_t>;

// Widens a removal so it does not leave two whitespace characters side by
// side, or a leading/trailing one at a text edge.
Range absorb_space(const std::u32string& t, Range r) {
  auto [a, b] = r;
  if (a == 0 && b < t.size() && text::is_space(t[b])) return {a, b + 1};
  if (b == t.size() && a > 0 && text::is_space(t[a - 1])) return {a - 1, b};
  if (a > 0 && b < t.size() && text::is_space(t[a - 1]) && text::is_space(t[b])) return {a, b + 1};
  return r;
}

std::vector<Range> merge(std::vector<Range> ranges) {
  std::sort(ranges.begin(), ranges.end());
  std::vector<Range> out;
  for (const auto& r : ranges) {
    if (!out.empty() && r.first <= out.back().second) {
      out.back().second = std::max(out.back().second, r.second);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

// Position after removal; positions inside a removed range land on its start.
std::size_t remap(std::size_t pos, const std::vector<Range>& removed) {
  std::size_t shift = 0;
  for (const auto& [a, b] : removed) {
    if (pos <= a) break;
    if (pos < b) return a - shift;
    shift += b - a;
  }
  return pos - shift;
}

bool inside(const Range& r, const std::vector<Range>& removed) {
  for (const auto& [a, b] : removed) {
    if (a <= r.first && r.second <= b) return true;
  }
  return false;
}

std::vector<Range> plan(const CandidateSpan& gold, const std::u32string& t, RemovalStrategy strategy,
                        std::size_t span_size, Rng& rng) {
  const SpanPositions& p = *gold.positions;
  std::vector<Range> ranges;
  switch (strategy) {
    case RemovalStrategy::kNothing:
      break;
    case RemovalStrategy::kMention: {
      std::string mention = text::encode(std::u32string_view(t).substr(p.mention_start, p.mention_end - p.mention_start));
      ranges = MentionMatcher({mention}).find_all(gold.text);
      ranges.emplace_back(p.mention_start, p.mention_end);
      break;
    }
    case RemovalStrategy::kSentence:
      ranges.emplace_back(p.sentence_start, p.sentence_end);
      break;
    case RemovalStrategy::kSpan: {
      const auto& sentences = p.sentences;
      auto it = std::find(sentences.begin(), sentences.end(), Range(p.sentence_start, p.sentence_end));
      std::size_t m = static_cast<std::size_t>(it - sentences.begin());
      std::size_t k = std::min(span_size, sentences.size());
      std::size_t lo = m + 1 >= k ? m + 1 - k : 0;
      std::size_t hi = std::min(m, sentences.size() - k);
      std::size_t start = lo + uniform_index(rng, hi - lo + 1);
      ranges.emplace_back(sentences[start].first, sentences[start + k - 1].second);
      break;
    }
  }
  for (auto& r : ranges) r = absorb_space(t, r);
  return merge(std::move(ranges));
}

}  // namespace

void RemovalWeights::check() const {
  double sum = 0;
  for (double w : p) {
    if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("removal weights must be finite and >= 0");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("removal weights must sum to 1");
}

RemovalWeights RemovalWeights::parse(std::string_view csv) {
  RemovalWeights w;
  std::istringstream in{std::string(csv)};
  std::string field;
  std::size_t i = 0;
  while (std::getline(in, field, ',')) {
    if (i == 4) throw std::invalid_argument("expected four removal weights");
    std::size_t used = 0;
    w.p[i++] = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("bad removal weight: " + field);
  }
  if (i != 4) throw std::invalid_argument("expected four removal weights");
  w.check();
  return w;
}

RemovalStrategy sample_strategy(Rng& rng, const RemovalWeights& weights, const Feasibility& feasible) {
  if (!feasible[0]) throw std::logic_error("rm_nth must always be feasible");
  std::discrete_distribution<int> pick(weights.p.begin(), weights.p.end());
  int s = pick(rng);
  while (!feasible[static_cast<std::size_t>(s)]) --s;
  return static_cast<RemovalStrategy>(s);
}

std::optional<AugmentedExample> try_removal(const RankingExample& example, RemovalStrategy strategy,
                                            std::size_t span_size, Rng& rng) {
  AugmentedExample out{example, RemovalStrategy::kNothing, {}};
  if (strategy == RemovalStrategy::kNothing) return out;
  const CandidateSpan& gold = example.gold();
  if (!gold.positions) return std::nullopt;
  std::u32string t = text::decode(gold.text);
  std::vector<Range> removed = plan(gold, t, strategy, span_size, rng);

  std::u32string rest;
  std::size_t cursor = 0;
  for (const auto& [a, b] : removed) {
    rest.append(t, cursor, a - cursor);
    cursor = b;
  }
  rest.append(t, cursor, std::u32string::npos);
  if (text::trim(std::u32string_view(rest)).empty()) return std::nullopt;

  const SpanPositions& p = *gold.positions;
  SpanPositions q;
  q.mention_start = remap(p.mention_start, removed);
  q.mention_end = remap(p.mention_end, removed);
  q.sentence_start = remap(p.sentence_start, removed);
  q.sentence_end = remap(p.sentence_end, removed);
  for (const auto& s : p.sentences) {
    if (inside(s, removed)) continue;
    Range mapped(remap(s.first, removed), remap(s.second, removed));
    if (mapped.first < mapped.second) q.sentences.push_back(mapped);
  }
  if (q.mention_start == q.mention_end) q.sentence_start = q.sentence_end = q.mention_start;

  CandidateSpan& new_gold = out.base.candidates[example.gold_index];
  new_gold.text = text::encode(rest);
  new_gold.positions = std::move(q);
  out.applied_strategy = strategy;
  out.removed_ranges = std::move(removed);
  return out;
}

AugmentedExample apply_removal(const RankingExample& example, RemovalStrategy strategy, std::size_t span_size,
                               Rng& rng) {
  auto out = try_removal(example, strategy, span_size, rng);
  if (!out) throw std::logic_error("infeasible removal: " + std::string(to_string(strategy)));
  return *std::move(out);
}

AugmentedExample augment(const RankingExample& example, const RemovalWeights& weights, Rng& rng) {
  std::size_t k = kMinSpanRemoval + uniform_index(rng, kMaxSpanRemoval - kMinSpanRemoval + 1);
  Feasibility feasible{true, false, false, false};
  std::array<std::optional<AugmentedExample>, 4> candidates;
  for (std::size_t s = 1; s < 4; ++s) {
    // Feasibility does not depend on the block position, so a scratch
    // generator keeps the main stream independent of which checks ran.
    Rng scratch(rng());
    candidates[s] = try_removal(example, static_cast<RemovalStrategy>(s), k, scratch);
    feasible[s] = candidates[s].has_value();
  }
  RemovalStrategy chosen = sample_strategy(rng, weights, feasible);
  if (chosen == RemovalStrategy::kNothing) return {example, RemovalStrategy::kNothing, {}};
  return *std::move(candidates[static_cast<std::size_t>(chosen)]);
}

Rng epoch_rng(std::uint64_t seed, std::uint64_t epoch, std::string_view example_id) {
  return record_rng(seed ^ (epoch * 0x9e3779b97f4a7c15ULL), example_id);
}

}  // namespace linkforge::augment
