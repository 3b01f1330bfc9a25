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

#include "linkforge/stats.hpp"

#include <algorithm>
#include <cstdio>

#include "linkforge/ndjson.hpp"

namespace linkforge::stats {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

CorpusStats corpus_stats(const std::filesystem::path& path) {
  CorpusStats out;
  NdjsonReader reader(path);
  if (!reader.kind()) return out;
  switch (*reader.kind()) {
    case RecordKind::kArticle: {
      ArticleRecord a;
      while (reader.next(a)) out.candidate_counts.push_back(a.sentence_count());
      break;
    }
    case RecordKind::kEvent: {
      InsertionEvent e;
      while (reader.next(e)) ++out.scenarios[e.link.lang][e.scenario];
      break;
    }
    case RecordKind::kExample: {
      RankingExample ex;
      while (reader.next(ex)) {
        ++out.scenarios[ex.lang][ex.scenario];
        out.candidate_counts.push_back(ex.candidates.size());
      }
      break;
    }
    default:
      break;
  }
  return out;
}

double ccdf(const std::vector<std::size_t>& values, std::size_t x) {
  if (values.empty()) return 0.0;
  auto n = std::count_if(values.begin(), values.end(), [&](std::size_t v) { return v >= x; });
  return static_cast<double>(n) / static_cast<double>(values.size());
}

std::vector<std::pair<std::size_t, double>> ccdf_table(const std::vector<std::size_t>& values) {
  std::vector<std::size_t> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    out.emplace_back(sorted[i], static_cast<double>(sorted.size() - i) / static_cast<double>(sorted.size()));
  }
  return out;
}

std::string format_stats(const CorpusStats& stats) {
  std::string out;
  if (!stats.scenarios.empty()) {
    out += "lang\tscenario\tcount\tfrequency\n";
    for (const auto& [lang, counts] : stats.scenarios) {
      std::size_t total = 0;
      for (const auto& [s, c] : counts) total += c;
      for (const auto& [s, c] : counts) {
        out += lang + '\t' + std::string(to_string(s)) + '\t' + std::to_string(c) + '\t' +
               fixed(static_cast<double>(c) / static_cast<double>(total)) + '\n';
      }
    }
  }
  if (!stats.candidate_counts.empty()) {
    if (!out.empty()) out += '\n';
    out += "candidates\tccdf\n";
    for (const auto& [x, p] : ccdf_table(stats.candidate_counts)) out += std::to_string(x) + '\t' + fixed(p) + '\n';
  }
  return out;
}

}  // namespace linkforge::stats
