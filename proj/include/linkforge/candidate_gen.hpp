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
#include <string>
#include <unordered_map>
#include <vector>

#include "linkforge/corpus_model.hpp"
#include "linkforge/mention_match.hpp"
#include "linkforge/rng.hpp"

// Candidate spans and ranking examples.
namespace linkforge::candidates {

inline constexpr std::size_t kDefaultWindow = 5;
inline constexpr std::size_t kDefaultNegatives = 9;

// One span per sentence of every section: the anchor sentence plus up to
// `window` sentences on each side, never crossing the section.
std::vector<CandidateSpan> partition_spans(const ArticleRecord& article, std::size_t window = kDefaultWindow);

// Spans of other articles, drawn as easy negatives.
class SpanPool {
 public:
  SpanPool() = default;
  explicit SpanPool(std::vector<CandidateSpan> spans) : spans_(std::move(spans)) {}

  void add(const std::vector<CandidateSpan>& spans) { spans_.insert(spans_.end(), spans.begin(), spans.end()); }
  std::size_t size() const { return spans_.size(); }
  const std::vector<CandidateSpan>& spans() const { return spans_; }

  // Up to `n` distinct spans, uniformly, skipping spans of `exclude_article`
  // and spans the matcher hits.
  std::vector<CandidateSpan> draw(std::size_t n, const std::string& exclude_article, const MentionMatcher& matcher,
                                  Rng& rng) const;

 private:
  std::vector<CandidateSpan> spans_;
};

// Hard negatives from `spans` (same article as `gold`): drops spans in the
// gold's section whose window covers the gold anchor and spans containing a
// target mention, then samples min(n, eligible) without replacement. Tops up
// to n from `pool` when `pool` is given. Throws
// DataError("insufficient negatives") if the pool cannot fill the gap.
std::vector<CandidateSpan> sample_negatives(const std::vector<CandidateSpan>& spans, const CandidateSpan& gold,
                                            const std::vector<std::string>& target_mentions, std::size_t n,
                                            const SpanPool* pool, Rng& rng);

// Negatives that stay eligible when every candidate is kept, in document
// order.
std::vector<CandidateSpan> eligible_negatives(const std::vector<CandidateSpan>& spans, const CandidateSpan& gold,
                                              const MentionMatcher& matcher);

enum class Mode { kTrain, kEval };

struct ExampleOptions {
  Mode mode = Mode::kEval;
  std::size_t negatives = kDefaultNegatives;  // train mode only
  std::size_t window = kDefaultWindow;
  std::uint64_t seed = 0;
};

// Previously used mentions per target qid, most frequent first, ties
// alphabetical.
using MentionIndex = std::unordered_map<std::string, std::vector<std::string>>;
MentionIndex build_mention_index(const std::vector<LinkRecord>& links);

// Example from an added link. The gold anchor is the before-version sentence
// at event.insertion_anchor in event.insertion_section. Throws
// DataError("missing section") for missing_section events and
// DataError("gold unresolvable") when the anchor is not in `before`.
RankingExample build_example(const InsertionEvent& event, const ArticleRecord& before, const TargetEntity& target,
                             const ExampleOptions& options, const SpanPool* pool = nullptr);

// Training example from an existing link of `article`. The gold span carries
// the mention and sentence positions needed for context removal.
RankingExample build_example(const LinkRecord& link, const ArticleRecord& article, const TargetEntity& target,
                             const ExampleOptions& options, const SpanPool* pool = nullptr);

}  // namespace linkforge::candidates
