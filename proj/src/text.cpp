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

#include "linkforge/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <stdexcept>

#include "linkforge/errors.hpp"

namespace linkforge::text {
namespace {

const icu::Normalizer2& nfkc_casefold() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC_Casefold unavailable");
    return n;
  }();
  return *instance;
}

std::u32string to_u32(const icu::UnicodeString& s) {
  std::u32string out;
  out.reserve(s.length());
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

icu::UnicodeString to_icu(std::u32string_view s) {
  icu::UnicodeString out;
  for (char32_t c : s) out.append(static_cast<UChar32>(c));
  return out;
}

}  // namespace

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    int32_t at = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) throw ParseError("invalid UTF-8", static_cast<std::size_t>(at));
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[4];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, 4, static_cast<UChar32>(c), error);
    if (error) throw std::invalid_argument("code point not encodable");
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

bool is_valid_utf8(std::string_view utf8) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::size_t length(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char b : utf8) {
    if ((b & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string slice(std::string_view utf8, std::size_t start, std::size_t end) {
  if (start > end) throw std::out_of_range("slice: start > end");
  std::size_t cp = 0;
  std::size_t begin_byte = std::string_view::npos;
  std::size_t end_byte = std::string_view::npos;
  for (std::size_t i = 0; i <= utf8.size(); ++i) {
    bool boundary = i == utf8.size() || (static_cast<unsigned char>(utf8[i]) & 0xC0) != 0x80;
    if (!boundary) continue;
    if (cp == start) begin_byte = i;
    if (cp == end) {
      end_byte = i;
      break;
    }
    ++cp;
  }
  if (begin_byte == std::string_view::npos || end_byte == std::string_view::npos) {
    throw std::out_of_range("slice: offsets beyond text");
  }
  return std::string(utf8.substr(begin_byte, end_byte - begin_byte));
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool is_word_char(char32_t c) {
  auto u = static_cast<UChar32>(c);
  if (u_isalnum(u)) return true;
  return (U_GET_GC_MASK(u) & U_GC_M_MASK) != 0;
}

bool is_scriptio_continua(char32_t c) {
  UErrorCode status = U_ZERO_ERROR;
  UScriptCode script = uscript_getScript(static_cast<UChar32>(c), &status);
  if (U_FAILURE(status)) return false;
  switch (script) {
    case USCRIPT_HAN:
    case USCRIPT_HIRAGANA:
    case USCRIPT_KATAKANA:
    case USCRIPT_THAI:
    case USCRIPT_LAO:
    case USCRIPT_KHMER:
    case USCRIPT_MYANMAR:
      return true;
    default:
      return false;
  }
}

bool is_sentence_initial(char32_t c) {
  auto u = static_cast<UChar32>(c);
  if (u_isupper(u) || u_istitle(u) || u_isdigit(u)) return true;
  return u_isalpha(u) && !u_islower(u) && !u_hasBinaryProperty(u, UCHAR_CASED);
}

std::u32string_view trim(std::u32string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

bool is_blank(std::string_view utf8) { return trim(std::u32string_view(decode(utf8))).empty(); }

std::u32string fold(std::u32string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfkc_casefold().normalize(to_icu(text), status);
  if (U_FAILURE(status)) throw std::runtime_error("normalization failed");
  return to_u32(out);
}

std::string fold(std::string_view utf8) { return encode(fold(std::u32string_view(decode(utf8)))); }

std::vector<Token> tokenize(std::u32string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t c = text[i];
    if (!is_word_char(c)) {
      ++i;
      continue;
    }
    if (is_scriptio_continua(c)) {
      tokens.push_back({std::u32string(1, c), i, i + 1});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && is_word_char(text[i]) && !is_scriptio_continua(text[i])) ++i;
    tokens.push_back({std::u32string(text.substr(start, i - start)), start, i});
  }
  return tokens;
}

std::vector<std::string> folded_tokens(std::string_view utf8) {
  std::vector<std::string> out;
  for (const auto& token : tokenize(decode(utf8))) out.push_back(encode(fold(token.text)));
  return out;
}

FoldedText fold_with_mapping(std::u32string_view source) {
  // Normalize chunk by chunk, cutting only where the normalizer guarantees a
  // boundary, so the concatenation equals normalizing the whole string.
  const icu::Normalizer2& norm = nfkc_casefold();
  FoldedText out;
  std::size_t begin = 0;
  while (begin < source.size()) {
    std::size_t end = begin + 1;
    while (end < source.size() && !norm.hasBoundaryBefore(static_cast<UChar32>(source[end]))) ++end;
    std::u32string chunk = fold(source.substr(begin, end - begin));
    for (char32_t c : chunk) {
      out.text.push_back(c);
      out.source_begin.push_back(begin);
      out.source_end.push_back(end);
    }
    begin = end;
  }
  return out;
}

}  // namespace linkforge::text
