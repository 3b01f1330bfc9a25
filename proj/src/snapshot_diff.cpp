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

#include "linkforge/snapshot_diff.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "linkforge/errors.hpp"
#include "linkforge/text.hpp"

namespace linkforge::diff {
namespace {

const std::regex kMarker(R"(---VERSION (\S+) (\S+)---)");

// LCS alignment on exact sentence equality. Returns, per after-sentence,
// the matched before index or -1.
std::vector<long> align(const std::vector<Sentence>& before, const std::vector<Sentence>& after) {
  const std::size_t n = before.size();
  const std::size_t m = after.size();
  std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = before[i].text == after[j].text ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::vector<long> match(m, -1);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    if (before[i].text == after[j].text) {
      match[j] = static_cast<long>(i);
      ++i;
      ++j;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return match;
}

std::vector<std::string> fold_tokens(const std::vector<text::Token>& tokens, std::size_t skip_begin,
                                     std::size_t skip_end) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i >= skip_begin && i < skip_end) continue;
    out.push_back(text::encode(text::fold(tokens[i].text)));
  }
  return out;
}

struct Located {
  const Section* section = nullptr;
  std::size_t mention_start = 0;  // into section text
  std::size_t mention_end = 0;
};

Located locate_link(const ArticleRecord& after, const LinkRecord& link) {
  for (const auto& section : after.sections) {
    if (section.title != link.section_title) continue;
    auto at = section.text.find(link.context);
    if (at == std::string::npos) continue;
    std::size_t base = text::length(std::string_view(section.text).substr(0, at));
    return {&section, base + link.mention_start, base + link.mention_end};
  }
  throw DataError("section not found", link.src_qid + " -> " + link.tgt_qid);
}

}  // namespace

std::vector<LinkPair> diff_links(const std::vector<LinkRecord>& a, const std::vector<LinkRecord>& b) {
  std::set<LinkPair> old_pairs;
  for (const auto& l : a) old_pairs.emplace(l.src_qid, l.tgt_qid);
  std::set<LinkPair> added;
  for (const auto& l : b) {
    LinkPair p(l.src_qid, l.tgt_qid);
    if (!old_pairs.count(p)) added.insert(std::move(p));
  }
  return {added.begin(), added.end()};
}

RevisionHistory parse_history(std::string_view content, std::string article_id, std::string_view default_lang) {
  RevisionHistory history;
  history.article_id = std::move(article_id);
  struct Block {
    std::string id;
    std::string timestamp;
    std::string markup;
  };
  std::vector<Block> blocks;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string line(content.substr(pos, eol - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (line.rfind("---VERSION", 0) == 0) {
      if (!std::regex_match(line, m, kMarker)) throw ParseError("malformed version marker", pos);
      blocks.push_back({m[1], m[2], {}});
    } else if (blocks.empty()) {
      if (!text::trim(std::string_view(line)).empty()) throw ParseError("content before first version marker", pos);
    } else {
      blocks.back().markup += line;
      blocks.back().markup += '\n';
    }
    pos = eol + 1;
  }
  if (blocks.empty()) throw InvariantError("no versions", history.article_id);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0 && blocks[i].timestamp < blocks[i - 1].timestamp) {
      throw InvariantError("version order", blocks[i].id);
    }
    Version v;
    v.version_id = blocks[i].id;
    v.timestamp = blocks[i].timestamp;
    v.article = ingest::make_raw_article(std::move(blocks[i].markup), v.version_id, default_lang);
    history.versions.push_back(std::move(v));
  }
  return history;
}

RevisionHistory load_history(const std::filesystem::path& path, std::string_view default_lang) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("unreadable history", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_history(buf.str(), path.stem().string(), default_lang);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

std::map<std::string, RevisionHistory> load_histories(const std::filesystem::path& dir,
                                                      std::string_view default_lang) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".history") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, RevisionHistory> out;
  for (const auto& file : files) {
    RevisionHistory h = load_history(file, default_lang);
    const auto& qid = h.versions.back().article.qid;
    if (!qid) continue;
    if (out.count(*qid)) throw DataError("duplicate history", *qid);
    out.emplace(*qid, std::move(h));
  }
  return out;
}

std::vector<std::size_t> link_counts(const RevisionHistory& history, const LinkPair& pair,
                                     const ingest::AbbreviationTable& abbreviations) {
  std::vector<std::size_t> counts;
  for (const auto& v : history.versions) {
    std::size_t n = 0;
    if (v.article.qid == pair.first) {
      for (const auto& anchor : ingest::parse_article(v.article, abbreviations).anchors) {
        if (anchor.target_qid == pair.second) ++n;
      }
    }
    counts.push_back(n);
  }
  return counts;
}

std::size_t first_transition(const std::vector<std::size_t>& counts) {
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i - 1] == 0 && counts[i] >= 1) return i;
  }
  throw DataError("not localizable");
}

std::pair<std::string, std::string> locate_insertion(const RevisionHistory& history, const LinkPair& pair) {
  std::size_t i = first_transition(link_counts(history, pair));
  return {history.versions[i - 1].version_id, history.versions[i].version_id};
}

double token_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

InsertionEvent classify_insertion(const ArticleRecord& before, const ArticleRecord& after, const LinkRecord& link,
                                  const ClassifyOptions& options) {
  Located where = locate_link(after, link);
  const Section& after_section = *where.section;
  auto star_index = ingest::sentence_at(after_section, where.mention_start);
  if (!star_index) throw DataError("section not found", "mention outside sentences");
  const std::size_t star = *star_index;

  InsertionEvent event;
  event.link = link;
  event.before_article_id = before.article_id;
  event.insertion_section = link.section_title;

  const Section* before_section = before.find_section(link.section_title);
  if (before_section == nullptr) {
    event.scenario = InsertionScenario::kMissingSection;
    event.insertion_anchor = 0;
    return event;
  }

  const auto& bs = before_section->sentences;
  const auto& as = after_section.sentences;
  std::vector<long> match = align(bs, as);
  if (match[star] >= 0) {
    event.scenario = InsertionScenario::kTextPresent;
    event.insertion_anchor = static_cast<std::size_t>(match[star]);
    return event;
  }

  std::vector<bool> before_matched(bs.size(), false);
  for (long m : match) {
    if (m >= 0) before_matched[static_cast<std::size_t>(m)] = true;
  }
  std::vector<std::vector<std::string>> before_tokens(bs.size());
  for (std::size_t j = 0; j < bs.size(); ++j) {
    if (!before_matched[j]) before_tokens[j] = text::folded_tokens(bs[j].text);
  }

  // (b) the sentence existed and only the mention (with a few neighbouring
  // tokens) was added.
  auto star_tokens = text::tokenize(text::decode(as[star].text));
  std::size_t rel_start = where.mention_start - as[star].start;
  std::size_t rel_end = std::min(where.mention_end, as[star].end) - as[star].start;
  std::size_t tl = star_tokens.size();
  std::size_t tr = 0;
  for (std::size_t k = 0; k < star_tokens.size(); ++k) {
    if (star_tokens[k].end > rel_start && star_tokens[k].start < rel_end) {
      tl = std::min(tl, k);
      tr = k + 1;
    }
  }
  if (tr == 0) {
    tl = tr = static_cast<std::size_t>(
        std::count_if(star_tokens.begin(), star_tokens.end(), [&](const text::Token& t) { return t.end <= rel_start; }));
  }
  double best = -1.0;
  std::size_t best_index = 0;
  for (std::size_t l = 0; l <= options.max_trim_tokens; ++l) {
    for (std::size_t r = 0; r <= options.max_trim_tokens; ++r) {
      std::size_t from = tl >= l ? tl - l : 0;
      std::size_t to = std::min(star_tokens.size(), tr + r);
      auto rest = fold_tokens(star_tokens, from, to);
      for (std::size_t j = 0; j < bs.size(); ++j) {
        if (before_matched[j]) continue;
        double s = token_jaccard(rest, before_tokens[j]);
        if (s > best) {
          best = s;
          best_index = j;
        }
      }
    }
  }
  if (best >= options.jaccard_threshold) {
    event.scenario = InsertionScenario::kMissingMention;
    event.insertion_anchor = best_index;
    return event;
  }

  // (c) new material. Unmatched after-sentences that closely resemble an
  // unmatched before-sentence are edits, not insertions, and end the run.
  auto is_new = [&](std::size_t i) {
    if (i == star) return true;
    if (match[i] >= 0) return false;
    auto tokens = text::folded_tokens(as[i].text);
    for (std::size_t j = 0; j < bs.size(); ++j) {
      if (!before_matched[j] && token_jaccard(tokens, before_tokens[j]) >= options.jaccard_threshold) return false;
    }
    return true;
  };
  std::size_t lo = star;
  while (lo > 0 && is_new(lo - 1)) --lo;
  std::size_t hi = star + 1;
  while (hi < as.size() && is_new(hi)) ++hi;
  event.scenario = hi - lo == 1 ? InsertionScenario::kMissingSentence : InsertionScenario::kMissingSpan;
  event.insertion_anchor = 0;
  for (std::size_t k = lo; k-- > 0;) {
    if (match[k] >= 0) {
      event.insertion_anchor = static_cast<std::size_t>(match[k]);
      break;
    }
  }
  return event;
}

InsertionEvent build_event(const RevisionHistory& history, const LinkPair& pair, const ingest::TargetInfo& target,
                           std::size_t window, const ClassifyOptions& options) {
  std::size_t t = first_transition(link_counts(history, pair));
  const Version& before_version = history.versions[t - 1];
  const Version& after_version = history.versions[t];
  ingest::ParsedArticle before = ingest::parse_article(before_version.article);
  ingest::ParsedArticle after = ingest::parse_article(after_version.article);
  if (after.rejection) throw DataError("unusable version", after_version.version_id + ": " + *after.rejection);
  ingest::TargetIndex targets{{pair.second, target}};
  auto links = ingest::extract_links(after, targets, window);
  auto it = std::find_if(links.begin(), links.end(), [&](const LinkRecord& l) { return l.tgt_qid == pair.second; });
  if (it == links.end()) throw DataError("not localizable", pair.first + " -> " + pair.second);
  InsertionEvent event = classify_insertion(before.record, after.record, *it, options);
  event.before_version_id = before_version.version_id;
  event.after_version_id = after_version.version_id;
  return event;
}

}  // namespace linkforge::diff
