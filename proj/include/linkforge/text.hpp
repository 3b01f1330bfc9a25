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
#include <string>
#include <string_view>
#include <vector>

// Unicode helpers. All offsets exchanged between modules are code point
// (Unicode scalar value) indices, never byte offsets.
namespace linkforge::text {

// Throws ParseError on malformed UTF-8.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
bool is_valid_utf8(std::string_view utf8);

// Number of code points.
std::size_t length(std::string_view utf8);

// Code point slice [start, end). Throws std::out_of_range when out of bounds.
std::string slice(std::string_view utf8, std::size_t start, std::size_t end);

bool is_space(char32_t c);
bool is_word_char(char32_t c);
// Characters from scripts written without inter-word spaces (Han, kana,
// Thai, Lao, Khmer, Myanmar).
bool is_scriptio_continua(char32_t c);
// Whether a sentence may start with this character: uppercase, titlecase,
// digit, or a letter of an uncased script.
bool is_sentence_initial(char32_t c);

std::u32string_view trim(std::u32string_view s);
std::string_view trim(std::string_view s);
bool is_blank(std::string_view utf8);

// NFKC normalization followed by full case folding.
std::string fold(std::string_view utf8);
std::u32string fold(std::u32string_view text);

struct Token {
  std::u32string text;
  std::size_t start = 0;  // code point offsets into the tokenized string
  std::size_t end = 0;
};

// Word tokens: maximal runs of letters, digits and combining marks. Every
// character of a scriptio-continua script is a token on its own.
std::vector<Token> tokenize(std::u32string_view text);

// Tokenizes, then folds each token; convenient for bag-of-words models.
std::vector<std::string> folded_tokens(std::string_view utf8);

// A string whose characters are mapped back to ranges of the source string
// it was normalized from.
struct FoldedText {
  std::u32string text;
  // For each character in `text`, the [begin, end) source range of the
  // normalization chunk it came from.
  std::vector<std::size_t> source_begin;
  std::vector<std::size_t> source_end;
};

FoldedText fold_with_mapping(std::u32string_view source);

}  // namespace linkforge::text
