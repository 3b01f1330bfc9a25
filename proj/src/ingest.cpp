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

#include "linkforge/ingest.hpp"

#include <algorithm>
#include <cstdint>

#include "linkforge/errors.hpp"
#include "linkforge/text.hpp"

namespace linkforge::ingest {

extern const char* const kBuiltinAbbreviations;  // generated from data/abbreviations.tsv

namespace {

// ---- markup scanning ----------------------------------------------------

struct Tag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;
  std::size_t offset = 0;
};

bool is_excluded_element(std::string_view name) {
  return name == "figure" || name == "table" || name == "note" || name == "caption";
}

class MarkupScanner {
 public:
  explicit MarkupScanner(std::string_view src) : src_(src) {}

  bool at_end() const { return pos_ >= src_.size(); }
  bool at_tag() const { return !at_end() && src_[pos_] == '<'; }
  std::size_t pos() const { return pos_; }

  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("markup " + std::to_string(line) + ":" + std::to_string(col) + ": " + message, at);
  }

  void skip_space() {
    while (!at_end() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  // Skips comments and processing instructions; true if one was skipped.
  bool skip_comment() {
    if (src_.compare(pos_, 4, "<!--") == 0) {
      auto end = src_.find("-->", pos_ + 4);
      if (end == std::string_view::npos) fail("unterminated comment", pos_);
      pos_ = end + 3;
      return true;
    }
    if (src_.compare(pos_, 2, "<?") == 0 || src_.compare(pos_, 2, "<!") == 0) {
      auto end = src_.find('>', pos_);
      if (end == std::string_view::npos) fail("unterminated declaration", pos_);
      pos_ = end + 1;
      return true;
    }
    return false;
  }

  Tag read_tag() {
    Tag tag;
    tag.offset = pos_;
    ++pos_;  // '<'
    if (!at_end() && src_[pos_] == '/') {
      tag.closing = true;
      ++pos_;
    }
    tag.name = read_name();
    if (tag.name.empty()) fail("expected element name", tag.offset);
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated tag <" + tag.name + ">", tag.offset);
      char c = src_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') fail("self-closing elements are not supported", pos_);
      if (tag.closing) fail("attributes on closing tag", pos_);
      std::size_t attr_at = pos_;
      std::string key = read_name();
      if (key.empty()) fail("malformed attribute", attr_at);
      skip_space();
      if (at_end() || src_[pos_] != '=') fail("attribute '" + key + "' needs a value", pos_);
      ++pos_;
      skip_space();
      if (at_end() || (src_[pos_] != '"' && src_[pos_] != '\'')) fail("attribute value must be quoted", pos_);
      char quote = src_[pos_++];
      auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value", attr_at);
      std::string value = decode_entities(src_.substr(pos_, end - pos_), pos_);
      pos_ = end + 1;
      if (!tag.attrs.emplace(key, value).second) fail("duplicate attribute '" + key + "'", attr_at);
    }
    return tag;
  }

  // Raw text up to the next '<', entities decoded.
  std::string read_text() {
    std::size_t start = pos_;
    auto end = src_.find('<', pos_);
    if (end == std::string_view::npos) end = src_.size();
    pos_ = end;
    return decode_entities(src_.substr(start, end - start), start);
  }

  // Skips the body of an element whose start tag was just read, honoring
  // nested elements, and consumes its end tag.
  void skip_element(const Tag& open) {
    std::vector<std::string> stack{open.name};
    while (!stack.empty()) {
      if (at_end()) fail("unclosed <" + stack.back() + ">", open.offset);
      if (!at_tag()) {
        read_text();
        continue;
      }
      if (skip_comment()) continue;
      Tag tag = read_tag();
      if (!tag.closing) {
        stack.push_back(tag.name);
      } else {
        if (tag.name != stack.back()) fail("mismatched </" + tag.name + ">, expected </" + stack.back() + ">", tag.offset);
        stack.pop_back();
      }
    }
  }

 private:
  std::string read_name() {
    std::size_t start = pos_;
    while (!at_end()) {
      char c = src_[pos_];
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                c == ':';
      if (!ok) break;
      ++pos_;
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw, std::size_t base) const {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos || semi - i > 10) fail("unterminated character reference", base + i);
      std::string_view name = raw.substr(i + 1, semi - i - 1);
      if (name == "amp") {
        out.push_back('&');
      } else if (name == "lt") {
        out.push_back('<');
      } else if (name == "gt") {
        out.push_back('>');
      } else if (name == "quot") {
        out.push_back('"');
      } else if (name == "apos") {
        out.push_back('\'');
      } else if (name.size() > 1 && name[0] == '#') {
        std::uint32_t cp = 0;
        bool hex = name[1] == 'x' || name[1] == 'X';
        std::string_view digits = name.substr(hex ? 2 : 1);
        if (digits.empty()) fail("empty numeric character reference", base + i);
        for (char d : digits) {
          int v;
          if (d >= '0' && d <= '9') {
            v = d - '0';
          } else if (hex && d >= 'a' && d <= 'f') {
            v = d - 'a' + 10;
          } else if (hex && d >= 'A' && d <= 'F') {
            v = d - 'A' + 10;
          } else {
            fail("bad numeric character reference", base + i);
          }
          cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
          if (cp > 0x10FFFF) fail("character reference out of range", base + i);
        }
        if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid character reference", base + i);
        out += text::encode(std::u32string(1, static_cast<char32_t>(cp)));
      } else {
        fail("unknown entity &" + std::string(name) + ";", base + i);
      }
      i = semi;
    }
    return out;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// ---- paragraph assembly -------------------------------------------------

struct ParagraphDraft {
  std::u32string text;
  std::vector<LinkAnchor> anchors;  // section index unset; offsets into text
  bool pending_space = false;

  void append(std::u32string_view chunk) {
    for (char32_t c : chunk) {
      if (text::is_space(c)) {
        if (!text.empty() && text.back() != U' ') pending_space = true;
        continue;
      }
      flush();
      text.push_back(c);
    }
  }

  void flush() {
    if (pending_space) text.push_back(U' ');
    pending_space = false;
  }
};

struct SectionDraft {
  std::string title;
  std::vector<ParagraphDraft> paragraphs;
};

struct ArticleDraft {
  std::map<std::string, std::string> attrs;
  std::vector<SectionDraft> sections;
  std::size_t empty_anchors = 0;
};

void parse_paragraph(MarkupScanner& scanner, const Tag& open, ArticleDraft& article, ParagraphDraft& para) {
  for (;;) {
    if (scanner.at_end()) scanner.fail("unclosed <p>", open.offset);
    if (!scanner.at_tag()) {
      para.append(text::decode(scanner.read_text()));
      continue;
    }
    if (scanner.skip_comment()) continue;
    Tag tag = scanner.read_tag();
    if (tag.closing) {
      if (tag.name != "p") scanner.fail("mismatched </" + tag.name + "> inside <p>", tag.offset);
      return;
    }
    if (is_excluded_element(tag.name)) {
      scanner.skip_element(tag);
      continue;
    }
    if (tag.name != "a") scanner.fail("unexpected <" + tag.name + "> inside <p>", tag.offset);
    auto href = tag.attrs.find("href");
    if (href == tag.attrs.end()) scanner.fail("<a> without href", tag.offset);
    std::string target;
    bool internal = href->second.rfind("qid:", 0) == 0;
    if (internal) target = href->second.substr(4);
    para.flush();
    std::size_t start = para.text.size();
    for (;;) {
      if (scanner.at_end()) scanner.fail("unclosed <a>", tag.offset);
      if (!scanner.at_tag()) {
        para.append(text::decode(scanner.read_text()));
        continue;
      }
      if (scanner.skip_comment()) continue;
      Tag inner = scanner.read_tag();
      if (!inner.closing || inner.name != "a") scanner.fail("unexpected markup inside <a>", inner.offset);
      break;
    }
    std::size_t end = para.text.size();
    if (!internal) continue;
    if (start == end) {
      ++article.empty_anchors;
      continue;
    }
    para.anchors.push_back({0, start, end, target});
  }
}

void parse_block(MarkupScanner& scanner, ArticleDraft& article, SectionDraft& section, const Tag& tag) {
  if (is_excluded_element(tag.name)) {
    scanner.skip_element(tag);
    return;
  }
  if (tag.name != "p") scanner.fail("unexpected <" + tag.name + ">", tag.offset);
  ParagraphDraft para;
  parse_paragraph(scanner, tag, article, para);
  if (!para.text.empty()) section.paragraphs.push_back(std::move(para));
}

void expect_blank(MarkupScanner& scanner) {
  std::size_t at = scanner.pos();
  std::string stray = scanner.read_text();
  if (!text::is_blank(stray)) scanner.fail("text outside a paragraph", at);
}

ArticleDraft parse_markup(std::string_view markup) {
  if (!text::is_valid_utf8(markup)) throw ParseError("markup is not valid UTF-8", 0);
  MarkupScanner scanner(markup);
  ArticleDraft article;
  for (;;) {
    scanner.skip_space();
    if (scanner.at_end()) scanner.fail("missing <article>", scanner.pos());
    if (!scanner.skip_comment()) break;
  }
  if (!scanner.at_tag()) scanner.fail("expected <article>", scanner.pos());
  Tag root = scanner.read_tag();
  if (root.closing || root.name != "article") scanner.fail("expected <article>", root.offset);
  article.attrs = root.attrs;

  bool closed = false;
  while (!closed) {
    if (scanner.at_end()) scanner.fail("unclosed <article>", root.offset);
    if (!scanner.at_tag()) {
      expect_blank(scanner);
      continue;
    }
    if (scanner.skip_comment()) continue;
    Tag tag = scanner.read_tag();
    if (tag.closing) {
      if (tag.name != "article") scanner.fail("mismatched </" + tag.name + ">", tag.offset);
      closed = true;
    } else if (tag.name == "section") {
      auto title = tag.attrs.find("title");
      if (title == tag.attrs.end()) scanner.fail("<section> without title", tag.offset);
      SectionDraft section{title->second, {}};
      for (;;) {
        if (scanner.at_end()) scanner.fail("unclosed <section>", tag.offset);
        if (!scanner.at_tag()) {
          expect_blank(scanner);
          continue;
        }
        if (scanner.skip_comment()) continue;
        Tag inner = scanner.read_tag();
        if (inner.closing) {
          if (inner.name != "section") scanner.fail("mismatched </" + inner.name + ">", inner.offset);
          break;
        }
        parse_block(scanner, article, section, inner);
      }
      article.sections.push_back(std::move(section));
    } else if (is_excluded_element(tag.name)) {
      scanner.skip_element(tag);
    } else {
      // Paragraphs ahead of the first titled section belong to the lead.
      bool has_titled = std::any_of(article.sections.begin(), article.sections.end(),
                                    [](const SectionDraft& s) { return !s.title.empty(); });
      if (tag.name == "p" && has_titled) scanner.fail("<p> outside a section", tag.offset);
      if (article.sections.empty()) article.sections.push_back({"", {}});
      parse_block(scanner, article, article.sections.back(), tag);
    }
  }
  for (;;) {
    scanner.skip_space();
    if (scanner.at_end()) break;
    if (!scanner.skip_comment()) scanner.fail("content after </article>", scanner.pos());
  }
  return article;
}

// ---- segmentation -------------------------------------------------------

bool is_terminal(char32_t c) {
  switch (c) {
    case U'.': case U'!': case U'?': case U'…': case U'‼': case U'⁇': case U'⁈':
    case U'⁉': case U'।': case U'॥': case U'؟': case U'۔': case U'።':
    case U'፧': case U'։':
      return true;
    default:
      return false;
  }
}

bool is_cjk_terminal(char32_t c) {
  return c == U'。' || c == U'！' || c == U'？' || c == U'｡';
}

bool is_closer(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U')': case U']': case U'}': case U'»': case U'”': case U'’':
    case U'」': case U'』': case U'）': case U'〉': case U'》':
      return true;
    default:
      return false;
  }
}

bool is_opener(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U'(': case U'[': case U'{': case U'«': case U'“': case U'‘':
    case U'「': case U'『': case U'（': case U'¿': case U'¡':
      return true;
    default:
      return false;
  }
}

}  // namespace

// ---- abbreviations ------------------------------------------------------

AbbreviationTable AbbreviationTable::parse(std::string_view tsv) {
  AbbreviationTable table;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    auto eol = tsv.find('\n', pos);
    if (eol == std::string_view::npos) eol = tsv.size();
    std::string_view line = text::trim(tsv.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("abbreviation line without tab", pos);
    table.add(std::string(text::trim(line.substr(0, tab))), std::string(text::trim(line.substr(tab + 1))));
  }
  return table;
}

const AbbreviationTable& AbbreviationTable::builtin() {
  static const AbbreviationTable table = parse(kBuiltinAbbreviations);
  return table;
}

void AbbreviationTable::add(std::string lang, std::string token) { by_lang_[std::move(lang)].insert(std::move(token)); }

bool AbbreviationTable::contains(std::string_view lang, std::string_view token) const {
  for (std::string_view key : {lang, std::string_view("*")}) {
    auto it = by_lang_.find(key);
    if (it != by_lang_.end() && it->second.count(std::string(token)) > 0) return true;
  }
  return false;
}

std::vector<Sentence> segment_sentences(std::string_view utf8, std::string_view lang,
                                        const AbbreviationTable& abbreviations) {
  std::u32string t = text::decode(utf8);
  const std::size_t n = t.size();
  std::vector<Sentence> out;

  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && text::is_space(t[b])) ++b;
    while (e > b && text::is_space(t[e - 1])) --e;
    if (b < e) out.push_back({text::encode(std::u32string_view(t).substr(b, e - b)), b, e});
  };

  auto abbreviation_ends_at = [&](std::size_t period) {
    std::size_t w = period;
    while (w > 0 && !text::is_space(t[w - 1])) --w;
    while (w < period && is_opener(t[w])) ++w;
    return abbreviations.contains(lang, text::encode(std::u32string_view(t).substr(w, period + 1 - w)));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    char32_t c = t[i];
    if (c == U'\n') {
      emit(start, i);
      start = ++i;
      continue;
    }
    if (is_cjk_terminal(c)) {
      std::size_t j = i + 1;
      while (j < n && (is_cjk_terminal(t[j]) || is_closer(t[j]))) ++j;
      emit(start, j);
      start = i = j;
      continue;
    }
    if (!is_terminal(c)) {
      ++i;
      continue;
    }
    std::size_t last_terminal = i;
    std::size_t j = i + 1;
    while (j < n && is_terminal(t[j])) last_terminal = j++;
    while (j < n && is_closer(t[j])) ++j;
    bool split = false;
    if (j < n && text::is_space(t[j]) && t[j] != U'\n') {
      std::size_t k = j;
      while (k < n && text::is_space(t[k]) && t[k] != U'\n') ++k;
      std::size_t m = k;
      while (m < n && is_opener(t[m])) ++m;
      if (m < n && text::is_sentence_initial(t[m])) {
        split = !(t[last_terminal] == U'.' && abbreviation_ends_at(last_terminal));
      }
      if (split) {
        emit(start, j);
        start = k;
        i = k;
        continue;
      }
    }
    i = j;
  }
  emit(start, n);
  return out;
}

// ---- articles -----------------------------------------------------------

RawArticle make_raw_article(std::string markup, std::string snapshot, std::string_view default_lang) {
  ArticleDraft draft = parse_markup(markup);
  RawArticle raw;
  raw.markup = std::move(markup);
  raw.snapshot = std::move(snapshot);
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = draft.attrs.find(key);
    if (it == draft.attrs.end()) return std::nullopt;
    return it->second;
  };
  raw.title = get("title").value_or("");
  raw.qid = get("qid");
  if (raw.qid && raw.qid->empty()) raw.qid.reset();
  raw.lang = get("lang").value_or(std::string(default_lang));
  return raw;
}

ParsedArticle parse_article(const RawArticle& raw, const AbbreviationTable& abbreviations) {
  ArticleDraft draft = parse_markup(raw.markup);
  ParsedArticle parsed;
  ArticleRecord& record = parsed.record;
  record.title = raw.title;
  record.qid = raw.qid;
  record.lang = raw.lang;
  record.snapshot = raw.snapshot;
  record.article_id = make_article_id(raw.lang, raw.title, raw.snapshot);
  parsed.empty_anchors = draft.empty_anchors;

  for (std::size_t si = 0; si < draft.sections.size(); ++si) {
    const SectionDraft& sd = draft.sections[si];
    Section section;
    section.title = sd.title;
    std::u32string joined;
    for (const auto& para : sd.paragraphs) {
      if (!joined.empty()) joined.push_back(U'\n');
      std::size_t base = joined.size();
      for (const auto& sentence : segment_sentences(text::encode(para.text), raw.lang, abbreviations)) {
        section.sentences.push_back({sentence.text, base + sentence.start, base + sentence.end});
      }
      for (const auto& anchor : para.anchors) {
        parsed.anchors.push_back({si, base + anchor.start, base + anchor.end, anchor.target_qid});
      }
      joined += para.text;
    }
    section.text = text::encode(joined);
    record.sections.push_back(std::move(section));
  }

  if (!draft.sections.empty() && draft.sections.front().title.empty() &&
      !draft.sections.front().paragraphs.empty()) {
    record.lead = text::encode(draft.sections.front().paragraphs.front().text);
  }
  if (record.lead.empty()) {
    parsed.rejection = "no lead";
  } else if (!record.qid) {
    parsed.rejection = "no qid";
  }
  return parsed;
}

ExtractStats& ExtractStats::operator+=(const ExtractStats& other) {
  emitted += other.emitted;
  self_links += other.self_links;
  unknown_targets += other.unknown_targets;
  empty_anchors += other.empty_anchors;
  return *this;
}

std::optional<std::size_t> sentence_at(const Section& section, std::size_t offset) {
  for (std::size_t i = 0; i < section.sentences.size(); ++i) {
    if (offset < section.sentences[i].end) return i;
  }
  return std::nullopt;
}

std::vector<LinkRecord> extract_links(const ParsedArticle& article, const TargetIndex& targets, std::size_t window,
                                      ExtractStats* stats) {
  ExtractStats local;
  local.empty_anchors = article.empty_anchors;
  std::vector<LinkRecord> links;
  const ArticleRecord& record = article.record;
  if (article.rejection) {
    if (stats) *stats += local;
    return links;
  }
  std::vector<std::u32string> section_texts;
  for (const auto& s : record.sections) section_texts.push_back(text::decode(s.text));

  for (const auto& anchor : article.anchors) {
    if (anchor.target_qid == *record.qid) {
      ++local.self_links;
      continue;
    }
    auto target = targets.find(anchor.target_qid);
    if (target == targets.end()) {
      ++local.unknown_targets;
      continue;
    }
    const Section& section = record.sections[anchor.section];
    auto first = sentence_at(section, anchor.start);
    auto last = sentence_at(section, anchor.end - 1);
    if (!first || !last) continue;  // cannot happen: anchors hold non-space text
    std::size_t lo = *first >= window ? *first - window : 0;
    std::size_t hi = std::max(*last, std::min(section.sentences.size() - 1, *first + window));
    std::size_t base = section.sentences[lo].start;
    std::size_t ctx_end = section.sentences[hi].end;
    const std::u32string& st = section_texts[anchor.section];

    LinkRecord link;
    link.src_qid = *record.qid;
    link.tgt_qid = anchor.target_qid;
    link.src_title = record.title;
    link.tgt_title = target->second.title;
    link.tgt_lead = target->second.lead;
    link.section_title = section.title;
    link.context = text::encode(std::u32string_view(st).substr(base, ctx_end - base));
    link.mention = text::encode(std::u32string_view(st).substr(anchor.start, anchor.end - anchor.start));
    link.mention_start = anchor.start - base;
    link.mention_end = anchor.end - base;
    link.sentence_start = section.sentences[*first].start - base;
    link.sentence_end = section.sentences[*last].end - base;
    link.lang = record.lang;
    links.push_back(std::move(link));
    ++local.emitted;
  }
  if (stats) *stats += local;
  return links;
}

std::vector<LinkRecord> extract_links(const ArticleRecord& article, const RawArticle& raw, const TargetIndex& targets,
                                      std::size_t window, ExtractStats* stats) {
  ParsedArticle parsed = parse_article(raw);
  parsed.record = article;
  return extract_links(parsed, targets, window, stats);
}

}  // namespace linkforge::ingest
