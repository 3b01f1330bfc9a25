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

#include "linkforge/ndjson.hpp"

#include "linkforge/errors.hpp"

namespace linkforge {

NdjsonWriter::NdjsonWriter(const std::filesystem::path& path, RecordKind kind) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw DataError("cannot write", path.string());
  out_ << header_line(kind) << '\n';
}

void NdjsonWriter::write_line(const std::string& line) {
  out_ << line << '\n';
  ++count_;
}

void NdjsonWriter::close() {
  out_.close();
  if (out_.fail()) throw DataError("write failed", path_.string());
}

NdjsonReader::NdjsonReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw DataError("missing input", path.string());
  std::string header;
  if (!std::getline(in_, header)) return;
  line_no_ = 1;
  try {
    kind_ = parse_header(header);
  } catch (const ParseError& e) {
    throw ParseError(where() + ": bad header: " + e.what(), e.offset());
  }
}

std::string NdjsonReader::where() const { return path_.string() + ":" + std::to_string(line_no_); }

bool NdjsonReader::next_line(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty()) return true;
  }
  return false;
}

template <typename T>
bool NdjsonReader::next(T& record) {
  std::string line;
  if (!next_line(line)) return false;
  try {
    record = deserialize_as<T>(line);
  } catch (const ParseError& e) {
    throw ParseError(where() + ": " + e.what(), e.offset());
  } catch (const InvariantError& e) {
    throw InvariantError(e.invariant(), where());
  }
  return true;
}

template <typename T>
std::vector<T> read_records(const std::filesystem::path& path) {
  NdjsonReader reader(path);
  std::vector<T> out;
  if (!reader.kind()) return out;
  if (*reader.kind() != RecordKindOf<T>::value) {
    throw ParseError(path.string() + ": expected kind '" + std::string(to_string(RecordKindOf<T>::value)) +
                         "', found '" + std::string(to_string(*reader.kind())) + "'",
                     0);
  }
  T record;
  while (reader.next(record)) out.push_back(std::move(record));
  return out;
}

#define LINKFORGE_INSTANTIATE(T)                           \
  template bool NdjsonReader::next<T>(T&);                 \
  template std::vector<T> read_records<T>(const std::filesystem::path&);

LINKFORGE_INSTANTIATE(ArticleRecord)
LINKFORGE_INSTANTIATE(LinkRecord)
LINKFORGE_INSTANTIATE(InsertionEvent)
LINKFORGE_INSTANTIATE(RankingExample)
LINKFORGE_INSTANTIATE(AugmentedExample)
LINKFORGE_INSTANTIATE(Ranking)

#undef LINKFORGE_INSTANTIATE

}  // namespace linkforge
