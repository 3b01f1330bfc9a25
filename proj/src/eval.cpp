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

#include "linkforge/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "linkforge/errors.hpp"
#include "linkforge/parallel.hpp"
#include "linkforge/rng.hpp"

namespace linkforge::eval {
namespace {

constexpr Bucket kBuckets[] = {Bucket::kOverall, Bucket::kPresent, Bucket::kMissing};

std::size_t rank_of(const Ranking& ranking, std::size_t gold_index) {
  if (gold_index >= ranking.order.size()) throw std::out_of_range("gold index outside ranking");
  auto it = std::find(ranking.order.begin(), ranking.order.end(), gold_index);
  if (it == ranking.order.end()) throw std::out_of_range("gold absent from ranking");
  return static_cast<std::size_t>(it - ranking.order.begin()) + 1;
}

struct Sum {
  std::size_t n = 0;
  double hits1 = 0;
  double rr = 0;
  double hits_k = 0;
};

BucketMetrics finish(const Sum& s, bool with_k) {
  BucketMetrics m;
  m.n = s.n;
  if (s.n == 0) return m;
  double n = static_cast<double>(s.n);
  m.hits1 = s.hits1 / n;
  m.mrr = s.rr / n;
  if (with_k) m.hits_k = s.hits_k / n;
  return m;
}

double metric_of(const ExampleResult& r, Metric m) { return m == Metric::kHits1 ? r.hits1 : r.rr; }

std::string_view metric_name(Metric m) { return m == Metric::kHits1 ? "hits@1" : "mrr"; }

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

int hits_at_k(const Ranking& ranking, std::size_t gold_index, std::size_t k) {
  if (k == 0) throw std::out_of_range("k must be >= 1");
  return rank_of(ranking, gold_index) <= k ? 1 : 0;
}

double mrr(const Ranking& ranking, std::size_t gold_index) {
  return 1.0 / static_cast<double>(rank_of(ranking, gold_index));
}

std::vector<ExampleResult> score_rankings(const std::vector<RankingExample>& examples,
                                          const std::vector<Ranking>& rankings, std::optional<std::size_t> k) {
  std::unordered_map<std::string, const Ranking*> by_id;
  for (const auto& r : rankings) by_id[r.example_id] = &r;
  std::vector<ExampleResult> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    auto it = by_id.find(ex.example_id);
    if (it == by_id.end()) throw DataError("missing ranking", ex.example_id);
    const Ranking& r = *it->second;
    if (r.order.size() != ex.candidates.size()) throw DataError("ranking size", ex.example_id);
    ExampleResult res;
    res.example_id = ex.example_id;
    res.lang = ex.lang;
    res.scenario = ex.scenario;
    res.rank = rank_of(r, ex.gold_index);
    res.hits1 = res.rank == 1 ? 1.0 : 0.0;
    res.rr = 1.0 / static_cast<double>(res.rank);
    if (k) res.hits_k = res.rank <= *k ? 1.0 : 0.0;
    out.push_back(std::move(res));
  }
  return out;
}

std::string_view to_string(Bucket bucket) {
  switch (bucket) {
    case Bucket::kOverall:
      return "overall";
    case Bucket::kPresent:
      return "present";
    case Bucket::kMissing:
      return "missing";
  }
  return "";
}

bool in_bucket(InsertionScenario scenario, Bucket bucket) {
  if (scenario == InsertionScenario::kMissingSection) return false;
  switch (bucket) {
    case Bucket::kOverall:
      return true;
    case Bucket::kPresent:
      return scenario == InsertionScenario::kTextPresent;
    case Bucket::kMissing:
      return scenario != InsertionScenario::kTextPresent;
  }
  return false;
}

const BucketMetrics& LanguageRow::bucket(Bucket b) const {
  return b == Bucket::kOverall ? overall : b == Bucket::kPresent ? present : missing;
}

BucketMetrics& LanguageRow::bucket(Bucket b) {
  return b == Bucket::kOverall ? overall : b == Bucket::kPresent ? present : missing;
}

EvalReport aggregate(const std::string& method, const std::vector<ExampleResult>& results,
                     std::optional<std::size_t> k) {
  std::map<std::string, std::array<Sum, 3>> sums;
  for (const auto& r : results) {
    auto& lang = sums[r.lang];
    for (std::size_t b = 0; b < 3; ++b) {
      if (!in_bucket(r.scenario, kBuckets[b])) continue;
      lang[b].n += 1;
      lang[b].hits1 += r.hits1;
      lang[b].rr += r.rr;
      lang[b].hits_k += r.hits_k.value_or(0);
    }
  }
  EvalReport report;
  report.method = method;
  report.k = k;
  report.macro.lang = "macro";
  for (const auto& [lang, by_bucket] : sums) {
    LanguageRow row;
    row.lang = lang;
    for (std::size_t b = 0; b < 3; ++b) row.bucket(kBuckets[b]) = finish(by_bucket[b], k.has_value());
    report.languages.push_back(std::move(row));
  }
  for (Bucket b : kBuckets) {
    Sum macro;
    std::size_t langs = 0;
    std::size_t total = 0;
    for (const auto& row : report.languages) {
      const BucketMetrics& m = row.bucket(b);
      total += m.n;
      if (m.n == 0) continue;
      ++langs;
      macro.hits1 += *m.hits1;
      macro.rr += *m.mrr;
      macro.hits_k += m.hits_k.value_or(0);
    }
    BucketMetrics& out = report.macro.bucket(b);
    out.n = total;
    if (langs > 0) {
      out.hits1 = macro.hits1 / static_cast<double>(langs);
      out.mrr = macro.rr / static_cast<double>(langs);
      if (k) out.hits_k = macro.hits_k / static_cast<double>(langs);
    }
  }
  return report;
}

double paired_significance(const std::vector<ExampleResult>& a, const std::vector<ExampleResult>& b, Metric metric,
                           std::size_t iterations, std::uint64_t seed, std::size_t workers) {
  if (a.size() != b.size()) throw DataError("misaligned results", "different example counts");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].example_id != b[i].example_id) throw DataError("misaligned results", a[i].example_id);
  }
  if (a.empty() || iterations == 0) return 1.0;
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  double observed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = metric_of(a[i], metric) - metric_of(b[i], metric);
    observed += diff[i];
  }
  if (observed == 0) return 1.0;
  const bool positive = observed > 0;
  auto flips = parallel_map(iterations, workers, [&](std::size_t it) -> int {
    Rng rng = record_rng(seed, "bootstrap:" + std::to_string(it));
    double sum = 0;
    for (std::size_t j = 0; j < n; ++j) sum += diff[uniform_index(rng, n)];
    return sum == 0 || (sum > 0) != positive ? 1 : 0;
  });
  std::size_t count = 0;
  for (int f : flips) count += static_cast<std::size_t>(f);
  return std::min(1.0, 2.0 * static_cast<double>(count) / static_cast<double>(iterations));
}

std::string format_table(const std::vector<EvalReport>& reports, const std::vector<Comparison>& comparisons) {
  std::vector<std::string> langs;
  for (const auto& rep : reports) {
    for (const auto& row : rep.languages) {
      if (std::find(langs.begin(), langs.end(), row.lang) == langs.end()) langs.push_back(row.lang);
    }
  }
  std::sort(langs.begin(), langs.end());
  langs.push_back("macro");

  auto significant = [&](const std::string& method, Bucket b, Metric m) {
    for (const auto& c : comparisons) {
      if (c.method == method && c.bucket == b && c.metric == m && c.p < 0.05) return true;
    }
    return false;
  };
  std::size_t width = 6;
  for (const auto& rep : reports) width = std::max(width, rep.method.size());

  std::string out;
  char buf[64];
  for (const auto& lang : langs) {
    out += "[" + lang + "]\n";
    std::string head = std::string(width, ' ');
    head.replace(0, 6, "method");
    out += head + " | Overall H@1   MRR | Present H@1   MRR | Missing H@1   MRR |    n (O/P/M)\n";
    for (const auto& rep : reports) {
      const LanguageRow* row = nullptr;
      if (lang == "macro") {
        row = &rep.macro;
      } else {
        for (const auto& r : rep.languages) {
          if (r.lang == lang) row = &r;
        }
      }
      std::string line = rep.method + std::string(width - rep.method.size(), ' ');
      for (Bucket b : kBuckets) {
        line += " |";
        BucketMetrics m = row ? row->bucket(b) : BucketMetrics{};
        for (Metric metric : {Metric::kHits1, Metric::kMrr}) {
          std::optional<double> v = metric == Metric::kHits1 ? m.hits1 : m.mrr;
          if (v) {
            std::snprintf(buf, sizeof buf, " %6.3f%s", *v, significant(rep.method, b, metric) ? "*" : " ");
          } else {
            std::snprintf(buf, sizeof buf, " %6s ", "-");
          }
          line += buf;
        }
      }
      std::snprintf(buf, sizeof buf, " | %zu/%zu/%zu", row ? row->overall.n : 0, row ? row->present.n : 0,
                    row ? row->missing.n : 0);
      line += buf;
      out += line + "\n";
    }
    out += "\n";
  }
  return out;
}

std::string format_ndjson(const std::vector<EvalReport>& reports, const std::vector<Comparison>& comparisons) {
  std::string out = R"({"schema":"linkforge/v1","kind":"report"})";
  out += "\n";
  for (const auto& rep : reports) {
    std::vector<const LanguageRow*> rows;
    for (const auto& r : rep.languages) rows.push_back(&r);
    rows.push_back(&rep.macro);
    for (const LanguageRow* row : rows) {
      for (Bucket b : kBuckets) {
        const BucketMetrics& m = row->bucket(b);
        nlohmann::json j{{"method", rep.method},
                         {"lang", row->lang},
                         {"bucket", to_string(b)},
                         {"n", m.n},
                         {"hits@1", optional_json(m.hits1)},
                         {"mrr", optional_json(m.mrr)}};
        if (rep.k) j["hits@" + std::to_string(*rep.k)] = optional_json(m.hits_k);
        out += j.dump() + "\n";
      }
    }
  }
  for (const auto& c : comparisons) {
    nlohmann::json j{{"method", c.method},
                     {"baseline", c.baseline},
                     {"bucket", to_string(c.bucket)},
                     {"metric", metric_name(c.metric)},
                     {"p", c.p}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace linkforge::eval
