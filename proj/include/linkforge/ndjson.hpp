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
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "linkforge/corpus_model.hpp"

namespace linkforge {

// Writes a header line followed by one serialized record per line.
class NdjsonWriter {
 public:
  NdjsonWriter(const std::filesystem::path& path, RecordKind kind);

  template <typename T>
  void write(const T& record) {
    write_line(serialize_record(record));
  }

  void write_line(const std::string& line);
  std::size_t count() const { return count_; }
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

// Streams records from a file written by NdjsonWriter. An empty file is a
// valid file with no records. Errors carry "path:line" in their message.
class NdjsonReader {
 public:
  explicit NdjsonReader(const std::filesystem::path& path);

  // Kind declared by the header; nullopt for an empty file.
  std::optional<RecordKind> kind() const { return kind_; }

  // Next raw record line; false at end of file.
  bool next_line(std::string& line);
  std::size_t line_number() const { return line_no_; }
  std::string where() const;

  template <typename T>
  bool next(T& record);

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::optional<RecordKind> kind_;
  std::size_t line_no_ = 0;
};

// Reads every record; throws ParseError if the header kind differs from T's.
template <typename T>
std::vector<T> read_records(const std::filesystem::path& path);

template <typename T>
void write_records(const std::filesystem::path& path, const std::vector<T>& records) {
  NdjsonWriter writer(path, RecordKindOf<T>::value);
  for (const auto& r : records) writer.write(r);
  writer.close();
}

}  // namespace linkforge
