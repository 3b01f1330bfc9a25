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

#include "linkforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "linkforge/errors.hpp"
#include "linkforge/eval.hpp"
#include "linkforge/ingest.hpp"
#include "linkforge/ndjson.hpp"
#include "linkforge/parallel.hpp"
#include "linkforge/scorer.hpp"

namespace linkforge::pipeline {

namespace {

std::atomic<bool> g_logging{true};
std::mutex g_log_mu;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing input", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> article_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("missing input", dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string key(const std::string& lang, const std::string& qid) { return lang + '\x1f' + qid; }

TargetEntity make_target(const LinkRecord& link, const candidates::MentionIndex& mentions) {
  TargetEntity target;
  target.title = link.tgt_title;
  target.lead = link.tgt_lead;
  if (auto it = mentions.find(link.tgt_qid); it != mentions.end()) target.mentions = it->second;
  return target;
}

candidates::MentionIndex load_mentions(const std::optional<fs::path>& path) {
  if (!path) return {};
  return candidates::build_mention_index(read_records<LinkRecord>(*path));
}

candidates::SpanPool build_pool(const std::vector<ArticleRecord>& articles, std::size_t window) {
  candidates::SpanPool pool;
  for (const auto& a : articles) pool.add(candidates::partition_spans(a, window));
  return pool;
}

}  // namespace

void set_logging(bool enabled) { g_logging = enabled; }

void log(std::string_view stage, std::string_view event,
         std::initializer_list<std::pair<std::string_view, std::string>> fields) {
  if (!g_logging) return;
  std::string line = "stage=" + std::string(stage) + " event=" + std::string(event);
  for (const auto& [k, v] : fields) {
    line += ' ';
    line += k;
    line += '=';
    line += v.find(' ') == std::string::npos ? v : '"' + v + '"';
  }
  line += '\n';
  std::lock_guard<std::mutex> lock(g_log_mu);
  std::fputs(line.c_str(), stderr);
}

IngestSummary ingest_dir(const fs::path& in, const fs::path& articles_out, const fs::path& links_out,
                         const IngestOptions& options) {
  auto files = article_files(in);
  auto parsed = parallel_map(files.size(), options.workers, [&](std::size_t i) {
    auto raw = ingest::make_raw_article(read_file(files[i]), options.snapshot, options.default_lang);
    try {
      return ingest::parse_article(raw);
    } catch (const ParseError& e) {
      throw ParseError(files[i].string() + ": " + e.what(), e.offset());
    }
  });

  IngestSummary summary;
  summary.files = files.size();
  std::map<std::string, ingest::TargetIndex> targets;  // by lang
  for (const auto& p : parsed) {
    if (p.rejection) {
      ++summary.rejected;
      log("ingest", "rejected", {{"title", p.record.title}, {"reason", *p.rejection}});
      continue;
    }
    targets[p.record.lang][*p.record.qid] = {p.record.title, p.record.lead};
  }

  struct Extracted {
    std::vector<LinkRecord> links;
    ingest::ExtractStats stats;
  };
  auto extracted = parallel_map(parsed.size(), options.workers, [&](std::size_t i) {
    Extracted e;
    if (!parsed[i].rejection) {
      e.links = ingest::extract_links(parsed[i], targets[parsed[i].record.lang], options.window, &e.stats);
    }
    return e;
  });

  NdjsonWriter articles(articles_out, RecordKind::kArticle);
  NdjsonWriter links(links_out, RecordKind::kLink);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].rejection) continue;
    articles.write(parsed[i].record);
    for (const auto& l : extracted[i].links) links.write(l);
    summary.links += extracted[i].stats;
  }
  articles.close();
  links.close();
  summary.articles = articles.count();
  log("ingest", "done",
      {{"snapshot", options.snapshot},
       {"articles", std::to_string(summary.articles)},
       {"rejected", std::to_string(summary.rejected)},
       {"links", std::to_string(summary.links.emitted)},
       {"self_links", std::to_string(summary.links.self_links)},
       {"unknown_targets", std::to_string(summary.links.unknown_targets)},
       {"empty_anchors", std::to_string(summary.links.empty_anchors)}});
  return summary;
}

DiffSummary diff_snapshots(const fs::path& a_links, const fs::path& b_links, const fs::path& events_out,
                           const std::optional<fs::path>& before_articles_out, const DiffOptions& options) {
  auto a = read_records<LinkRecord>(a_links);
  auto b = read_records<LinkRecord>(b_links);
  auto pairs = diff::diff_links(a, b);
  if (!fs::is_directory(options.histories)) throw DataError("missing input", options.histories.string());
  auto histories = diff::load_histories(options.histories, options.default_lang);

  std::map<diff::LinkPair, ingest::TargetInfo> target_of;
  for (const auto& l : b) target_of.emplace(diff::LinkPair{l.src_qid, l.tgt_qid}, ingest::TargetInfo{l.tgt_title, l.tgt_lead});

  struct Outcome {
    std::optional<InsertionEvent> event;
    std::optional<ArticleRecord> before;
    std::string skip;  // reason tag when no event
  };
  auto outcomes = parallel_map(pairs.size(), options.workers, [&](std::size_t i) {
    Outcome out;
    const auto& pair = pairs[i];
    auto h = histories.find(pair.first);
    if (h == histories.end()) {
      out.skip = "no history";
      return out;
    }
    try {
      out.event = diff::build_event(h->second, pair, target_of.at(pair), options.window, options.classify);
    } catch (const DataError& e) {
      out.skip = e.reason();
      return out;
    }
    for (const auto& v : h->second.versions) {
      if (v.version_id == out.event->before_version_id) out.before = ingest::parse_article(v.article).record;
    }
    return out;
  });

  DiffSummary summary;
  summary.added = pairs.size();
  NdjsonWriter events(events_out, RecordKind::kEvent);
  std::map<std::string, ArticleRecord> before;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (!o.event) {
      if (o.skip == "no history") {
        ++summary.no_history;
      } else if (o.skip == "not localizable") {
        ++summary.not_localizable;
      } else {
        ++summary.unclassified;
      }
      log("diff", "skipped", {{"src", pairs[i].first}, {"tgt", pairs[i].second}, {"reason", o.skip}});
      continue;
    }
    events.write(*o.event);
    if (o.before) before.emplace(o.before->article_id, std::move(*o.before));
  }
  events.close();
  summary.events = events.count();
  if (before_articles_out) {
    NdjsonWriter w(*before_articles_out, RecordKind::kArticle);
    for (const auto& [id, article] : before) w.write(article);
    w.close();
  }
  log("diff", "done",
      {{"added", std::to_string(summary.added)},
       {"events", std::to_string(summary.events)},
       {"no_history", std::to_string(summary.no_history)},
       {"not_localizable", std::to_string(summary.not_localizable)},
       {"unclassified", std::to_string(summary.unclassified)}});
  return summary;
}

CandidateSummary candidates_from_events(const fs::path& events_path, const fs::path& articles_path,
                                        const fs::path& out, const std::optional<fs::path>& side_out,
                                        const CandidateOptions& options) {
  auto events = read_records<InsertionEvent>(events_path);
  auto articles = read_records<ArticleRecord>(articles_path);
  auto mentions = load_mentions(options.mentions);
  std::map<std::string, const ArticleRecord*> by_id;
  for (const auto& a : articles) by_id.emplace(a.article_id, &a);
  candidates::SpanPool pool;
  if (options.example.mode == candidates::Mode::kTrain) pool = build_pool(articles, options.example.window);

  auto built = parallel_map(events.size(), options.workers, [&](std::size_t i) -> std::optional<RankingExample> {
    const auto& e = events[i];
    if (e.scenario == InsertionScenario::kMissingSection) return std::nullopt;
    auto it = by_id.find(e.before_article_id);
    if (it == by_id.end()) throw DataError("missing article", e.before_article_id);
    try {
      return candidates::build_example(e, *it->second, make_target(e.link, mentions), options.example, &pool);
    } catch (const DataError& err) {
      if (err.reason() != "gold unresolvable") throw;
      return std::nullopt;
    }
  });

  CandidateSummary summary;
  NdjsonWriter w(out, RecordKind::kExample);
  std::optional<NdjsonWriter> side;
  if (side_out) side.emplace(*side_out, RecordKind::kEvent);
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (built[i]) {
      w.write(*built[i]);
    } else if (events[i].scenario == InsertionScenario::kMissingSection) {
      ++summary.missing_section;
      if (side) side->write(events[i]);
    } else {
      ++summary.unresolvable;
      log("candidates", "skipped", {{"src", events[i].link.src_qid}, {"tgt", events[i].link.tgt_qid}, {"reason", "gold unresolvable"}});
    }
  }
  w.close();
  if (side) side->close();
  summary.examples = w.count();
  log("candidates", "done",
      {{"source", "events"},
       {"examples", std::to_string(summary.examples)},
       {"missing_section", std::to_string(summary.missing_section)},
       {"unresolvable", std::to_string(summary.unresolvable)}});
  return summary;
}

CandidateSummary candidates_from_links(const fs::path& links_path, const fs::path& articles_path,
                                       const fs::path& out, const CandidateOptions& options) {
  auto links = read_records<LinkRecord>(links_path);
  auto articles = read_records<ArticleRecord>(articles_path);
  auto mentions = options.mentions ? load_mentions(options.mentions) : candidates::build_mention_index(links);
  std::map<std::string, const ArticleRecord*> by_qid;
  for (const auto& a : articles) {
    if (a.qid) by_qid.emplace(key(a.lang, *a.qid), &a);
  }
  candidates::SpanPool pool;
  if (options.example.mode == candidates::Mode::kTrain) pool = build_pool(articles, options.example.window);

  auto built = parallel_map(links.size(), options.workers, [&](std::size_t i) -> std::optional<RankingExample> {
    const auto& l = links[i];
    auto it = by_qid.find(key(l.lang, l.src_qid));
    if (it == by_qid.end()) return std::nullopt;
    return candidates::build_example(l, *it->second, make_target(l, mentions), options.example, &pool);
  });

  CandidateSummary summary;
  NdjsonWriter w(out, RecordKind::kExample);
  for (auto& ex : built) {
    if (ex) {
      w.write(*ex);
    } else {
      ++summary.unresolvable;
    }
  }
  w.close();
  summary.examples = w.count();
  log("candidates", "done",
      {{"source", "links"},
       {"examples", std::to_string(summary.examples)},
       {"unresolvable", std::to_string(summary.unresolvable)}});
  return summary;
}

std::size_t augment_file(const fs::path& in, const fs::path& out, const AugmentOptions& options) {
  options.weights.check();
  auto examples = read_records<RankingExample>(in);
  auto augmented = parallel_map(examples.size(), options.workers, [&](std::size_t i) {
    Rng rng = augment::epoch_rng(options.seed, options.epoch, examples[i].example_id);
    return augment::augment(examples[i], options.weights, rng);
  });
  std::array<std::size_t, 4> counts{};
  for (const auto& a : augmented) ++counts[static_cast<std::size_t>(a.applied_strategy)];
  write_records(out, augmented);
  log("augment", "done",
      {{"examples", std::to_string(augmented.size())},
       {"rm_nth", std::to_string(counts[0])},
       {"rm_mention", std::to_string(counts[1])},
       {"rm_sent", std::to_string(counts[2])},
       {"rm_span", std::to_string(counts[3])}});
  return augmented.size();
}

RankSummary rank_file(const fs::path& in, const fs::path& out, const RankOptions& options) {
  const std::string& m = options.method;
  if (m != "random" && m != "string_match" && m != "bm25" && m != "external") {
    throw ConfigError("unknown method '" + m + "'");
  }
  if (m == "external" && options.scorer_cmd.empty()) throw ConfigError("method external needs a scorer command");
  if (m == "bm25") options.bm25.check();
  auto examples = read_records<RankingExample>(in);

  RankSummary summary;
  summary.method = m;
  NdjsonWriter w(out, RecordKind::kRanking);
  if (m == "external") {
    rankers::ExternalScorer scorer({options.scorer_cmd, options.timeout});
    for (const auto& ex : examples) {
      try {
        auto r = rankers::rank_external(ex, scorer);
        summary.method = r.method;
        w.write(r);
      } catch (const ProtocolError& e) {
        summary.failed.emplace_back(ex.example_id, e.what());
      } catch (const TimeoutError& e) {
        summary.failed.emplace_back(ex.example_id, e.what());
      }
    }
    scorer.stop();
    for (const auto& [id, why] : summary.failed) log("rank", "failed", {{"example", id}, {"error", why}});
  } else {
    std::set<std::string> stopwords;
    if (options.stopwords) stopwords = rankers::load_stopwords(options.stopwords->string());
    const auto* sw = options.stopwords ? &stopwords : nullptr;
    auto rankings = parallel_map(examples.size(), options.workers, [&](std::size_t i) {
      if (m == "random") return rankers::rank_random(examples[i], options.seed);
      if (m == "string_match") return rankers::rank_string_match(examples[i]);
      return rankers::rank_bm25(examples[i], options.bm25, sw);
    });
    for (const auto& r : rankings) w.write(r);
  }
  w.close();
  summary.ranked = w.count();
  log("rank", "done",
      {{"method", summary.method},
       {"ranked", std::to_string(summary.ranked)},
       {"failed", std::to_string(summary.failed.size())}});
  return summary;
}

EvalOutput evaluate_files(const std::vector<fs::path>& rankings, const fs::path& examples_path,
                          const EvalOptions& options) {
  if (rankings.empty()) throw ConfigError("no rankings given");
  auto examples = read_records<RankingExample>(examples_path);
  std::vector<eval::EvalReport> reports;
  std::vector<std::vector<eval::ExampleResult>> results;
  for (const auto& path : rankings) {
    auto rs = read_records<Ranking>(path);
    std::string method = rs.empty() ? path.stem().string() : rs.front().method;
    results.push_back(eval::score_rankings(examples, rs, options.k));
    reports.push_back(eval::aggregate(method, results.back(), options.k));
  }

  std::vector<eval::Comparison> comparisons;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    for (auto bucket : {eval::Bucket::kOverall, eval::Bucket::kPresent, eval::Bucket::kMissing}) {
      std::vector<eval::ExampleResult> a, b;
      for (std::size_t j = 0; j < results[i].size(); ++j) {
        if (!eval::in_bucket(results[i][j].scenario, bucket)) continue;
        a.push_back(results[i][j]);
        b.push_back(results[0][j]);
      }
      for (auto metric : {eval::Metric::kHits1, eval::Metric::kMrr}) {
        double p = eval::paired_significance(a, b, metric, options.iterations, options.seed, options.workers);
        comparisons.push_back({reports[i].method, reports[0].method, bucket, metric, p});
      }
    }
  }
  log("eval", "done", {{"methods", std::to_string(reports.size())}, {"examples", std::to_string(examples.size())}});
  return {eval::format_table(reports, comparisons), eval::format_ndjson(reports, comparisons)};
}

}  // namespace linkforge::pipeline
