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

#include "linkforge/candidate_gen.hpp"

#include <algorithm>
#include <set>

#include "linkforge/errors.hpp"
#include "linkforge/hash.hpp"
#include "linkforge/text.hpp"

namespace linkforge::candidates {
namespace {

CandidateSpan make_span(const ArticleRecord& article, std::size_t section_index, std::size_t anchor,
                        std::size_t window) {
  const Section& section = article.sections[section_index];
  std::size_t lo = anchor >= window ? anchor - window : 0;
  std::size_t hi = std::min(section.sentences.size() - 1, anchor + window);
  CandidateSpan span;
  span.article_id = article.article_id;
  span.section_index = section_index;
  span.section_title = section.title;
  span.anchor_index = anchor;
  span.window = window;
  span.text = text::slice(section.text, section.sentences[lo].start, section.sentences[hi].end);
  return span;
}

bool covers_gold(const CandidateSpan& span, const CandidateSpan& gold) {
  if (span.article_id != gold.article_id || span.section_index != gold.section_index) return false;
  std::size_t d = span.anchor_index > gold.anchor_index ? span.anchor_index - gold.anchor_index
                                                        : gold.anchor_index - span.anchor_index;
  return d <= span.window;
}

// Partial Fisher-Yates: the first k entries become a uniform sample.
template <typename T>
void sample_prefix(std::vector<T>& items, std::size_t k, Rng& rng) {
  k = std::min(k, items.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + uniform_index(rng, items.size() - i);
    std::swap(items[i], items[j]);
  }
  items.resize(k);
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[uniform_index(rng, i)]);
}

struct Gold {
  std::size_t section = 0;
  std::size_t anchor = 0;
  std::optional<SpanPositions> positions;
};

RankingExample assemble(std::string example_id, const ArticleRecord& article, const Gold& g,
                        const TargetEntity& target, InsertionScenario scenario, const ExampleOptions& options,
                        const SpanPool* pool) {
  Rng rng = record_rng(options.seed, example_id);
  std::vector<CandidateSpan> spans = partition_spans(article, options.window);
  CandidateSpan gold = make_span(article, g.section, g.anchor, options.window);
  gold.is_gold = true;
  gold.positions = g.positions;

  RankingExample ex;
  ex.example_id = std::move(example_id);
  ex.target = target;
  ex.scenario = scenario;
  ex.lang = article.lang;

  if (options.mode == Mode::kTrain) {
    ex.candidates = sample_negatives(spans, gold, target.mentions, options.negatives, pool, rng);
    ex.candidates.push_back(gold);
    shuffle(ex.candidates, rng);
  } else {
    MentionMatcher matcher(target.mentions);
    auto negatives = eligible_negatives(spans, gold, matcher);
    bool placed = false;
    for (auto& span : negatives) {
      if (!placed && std::make_pair(gold.section_index, gold.anchor_index) <
                         std::make_pair(span.section_index, span.anchor_index)) {
        ex.candidates.push_back(gold);
        placed = true;
      }
      ex.candidates.push_back(std::move(span));
    }
    if (!placed) ex.candidates.push_back(gold);
  }
  for (std::size_t i = 0; i < ex.candidates.size(); ++i) {
    if (ex.candidates[i].is_gold) ex.gold_index = i;
  }
  return ex;
}

}  // namespace

std::vector<CandidateSpan> partition_spans(const ArticleRecord& article, std::size_t window) {
  std::vector<CandidateSpan> spans;
  for (std::size_t s = 0; s < article.sections.size(); ++s) {
    for (std::size_t a = 0; a < article.sections[s].sentences.size(); ++a) {
      spans.push_back(make_span(article, s, a, window));
    }
  }
  return spans;
}

std::vector<CandidateSpan> SpanPool::draw(std::size_t n, const std::string& exclude_article,
                                          const MentionMatcher& matcher, Rng& rng) const {
  std::vector<CandidateSpan> out;
  if (n == 0 || spans_.empty()) return out;
  auto usable = [&](std::size_t i) {
    return spans_[i].article_id != exclude_article && !matcher.matches(spans_[i].text);
  };
  // Rejection sampling keeps the cost independent of the pool size; a full
  // scan takes over when too many draws are rejected.
  std::set<std::size_t> taken;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 20 * n + 20;
  while (taken.size() < n && attempts++ < max_attempts) {
    std::size_t i = uniform_index(rng, spans_.size());
    if (!taken.count(i) && usable(i)) taken.insert(i);
  }
  std::vector<std::size_t> order;
  if (taken.size() < n) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < spans_.size(); ++i) {
      if (!taken.count(i) && usable(i)) rest.push_back(i);
    }
    sample_prefix(rest, n - taken.size(), rng);
    taken.insert(rest.begin(), rest.end());
  }
  for (std::size_t i : taken) {
    CandidateSpan span = spans_[i];
    span.is_gold = false;
    span.positions.reset();
    out.push_back(std::move(span));
  }
  return out;
}

std::vector<CandidateSpan> eligible_negatives(const std::vector<CandidateSpan>& spans, const CandidateSpan& gold,
                                              const MentionMatcher& matcher) {
  std::vector<CandidateSpan> out;
  for (const auto& span : spans) {
    if (covers_gold(span, gold) || matcher.matches(span.text)) continue;
    CandidateSpan negative = span;
    negative.is_gold = false;
    negative.positions.reset();
    out.push_back(std::move(negative));
  }
  return out;
}

std::vector<CandidateSpan> sample_negatives(const std::vector<CandidateSpan>& spans, const CandidateSpan& gold,
                                            const std::vector<std::string>& target_mentions, std::size_t n,
                                            const SpanPool* pool, Rng& rng) {
  if (n == 0) throw std::logic_error("sample_negatives: n must be positive");
  MentionMatcher matcher(target_mentions);
  std::vector<CandidateSpan> out = eligible_negatives(spans, gold, matcher);
  sample_prefix(out, n, rng);
  if (out.size() < n && pool != nullptr) {
    auto easy = pool->draw(n - out.size(), gold.article_id, matcher, rng);
    out.insert(out.end(), easy.begin(), easy.end());
    if (out.size() < n) {
      throw DataError("insufficient negatives", "short by " + std::to_string(n - out.size()));
    }
  }
  return out;
}

MentionIndex build_mention_index(const std::vector<LinkRecord>& links) {
  std::unordered_map<std::string, std::map<std::string, std::size_t>> counts;
  for (const auto& l : links) {
    if (!text::is_blank(l.mention)) ++counts[l.tgt_qid][l.mention];
  }
  MentionIndex index;
  for (auto& [qid, by_mention] : counts) {
    std::vector<std::pair<std::string, std::size_t>> sorted(by_mention.begin(), by_mention.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    auto& out = index[qid];
    for (auto& [mention, count] : sorted) out.push_back(mention);
  }
  return index;
}

RankingExample build_example(const InsertionEvent& event, const ArticleRecord& before, const TargetEntity& target,
                             const ExampleOptions& options, const SpanPool* pool) {
  if (event.scenario == InsertionScenario::kMissingSection) throw DataError("missing section");
  std::optional<std::size_t> section;
  for (std::size_t s = 0; s < before.sections.size(); ++s) {
    if (before.sections[s].title == event.insertion_section) {
      section = s;
      break;
    }
  }
  if (!section || event.insertion_anchor >= before.sections[*section].sentences.size()) {
    throw DataError("gold unresolvable", event.link.src_qid + " -> " + event.link.tgt_qid);
  }
  std::string id = "ev-" + hex64(fnv1a64(event.link.src_qid + '\x1f' + event.link.tgt_qid + '\x1f' +
                                         event.before_version_id + '\x1f' + event.after_version_id));
  return assemble(std::move(id), before, {*section, event.insertion_anchor, std::nullopt}, target, event.scenario,
                  options, pool);
}

RankingExample build_example(const LinkRecord& link, const ArticleRecord& article, const TargetEntity& target,
                             const ExampleOptions& options, const SpanPool* pool) {
  for (std::size_t s = 0; s < article.sections.size(); ++s) {
    const Section& section = article.sections[s];
    if (section.title != link.section_title) continue;
    auto at = section.text.find(link.context);
    if (at == std::string::npos) continue;
    std::size_t base = text::length(std::string_view(section.text).substr(0, at));
    std::size_t ms = base + link.mention_start;
    std::size_t me = base + link.mention_end;
    std::size_t ss = base + link.sentence_start;
    std::size_t se = base + link.sentence_end;
    std::size_t anchor = 0;
    while (anchor < section.sentences.size() && section.sentences[anchor].end <= ms) ++anchor;
    if (anchor == section.sentences.size()) break;

    Gold g{s, anchor, std::nullopt};
    std::size_t lo = anchor >= options.window ? anchor - options.window : 0;
    std::size_t hi = std::min(section.sentences.size() - 1, anchor + options.window);
    std::size_t origin = section.sentences[lo].start;
    bool single = section.sentences[anchor].start == ss && section.sentences[anchor].end == se;
    if (single) {
      SpanPositions p{ms - origin, me - origin, ss - origin, se - origin, {}};
      for (std::size_t k = lo; k <= hi; ++k) {
        p.sentences.emplace_back(section.sentences[k].start - origin, section.sentences[k].end - origin);
      }
      g.positions = std::move(p);
    }
    std::string id = "ln-" + hex64(fnv1a64(article.article_id + '\x1f' + link.tgt_qid + '\x1f' +
                                           std::to_string(s) + '\x1f' + std::to_string(ms)));
    return assemble(std::move(id), article, g, target, InsertionScenario::kTextPresent, options, pool);
  }
  throw DataError("gold unresolvable", link.src_qid + " -> " + link.tgt_qid);
}

}  // namespace linkforge::candidates
