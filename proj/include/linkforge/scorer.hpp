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

#include <chrono>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

#include "linkforge/corpus_model.hpp"

// Client side of the external scorer protocol. The scorer is a child
// process speaking newline-delimited JSON on its stdin/stdout:
//
//   -> {"type":"hello","protocol":"linkforge-scorer/1"}
//   <- {"type":"ready","name":"..."}
//   -> {"type":"score","example_id":"...","target":{...},"candidates":[{"section":...,"text":...}]}
//   <- {"type":"scores","example_id":"...","scores":[...]}
//
// One request is in flight per connection. The child's stderr is inherited.
namespace linkforge::rankers {

inline constexpr std::string_view kScorerProtocol = "linkforge-scorer/1";

struct ScorerOptions {
  std::string command;  // run through /bin/sh -c
  std::chrono::milliseconds timeout{60000};
};

class ExternalScorer {
 public:
  explicit ExternalScorer(ScorerOptions options);
  ~ExternalScorer();
  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  // Starts the process and completes the handshake if not running yet.
  void start();
  // Scores of the example's candidates. Throws ProtocolError for a broken
  // reply and TimeoutError when the scorer does not answer in time; after a
  // timeout or a reply that leaves the stream unusable the process is killed
  // and the next call starts a fresh one.
  std::vector<double> score(const RankingExample& example);
  void stop();

  bool running() const { return pid_ > 0; }
  const std::string& name() const { return name_; }
  std::size_t restarts() const { return restarts_; }

 private:
  void write_line(const std::string& line);
  std::string read_line(std::chrono::steady_clock::time_point deadline);

  ScorerOptions options_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string name_;
  std::size_t starts_ = 0;
  std::size_t restarts_ = 0;
};

std::string score_request(const RankingExample& example);

// Validates one reply line: type, example id, count and finiteness.
std::vector<double> parse_score_reply(std::string_view line, const std::string& example_id, std::size_t expected);

Ranking rank_external(const RankingExample& example, ExternalScorer& scorer);

}  // namespace linkforge::rankers
