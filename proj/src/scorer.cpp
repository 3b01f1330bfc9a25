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

#include "linkforge/scorer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <json.hpp>

#include "linkforge/errors.hpp"

namespace linkforge::rankers {
namespace {

using json = nlohmann::json;

// Errors after which the byte stream cannot be trusted.
class StreamBroken : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

void ignore_sigpipe() {
  static const bool done = [] {
    signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

ExternalScorer::ExternalScorer(ScorerOptions options) : options_(std::move(options)) {}

ExternalScorer::~ExternalScorer() { stop(); }

void ExternalScorer::start() {
  if (running()) return;
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = fork();
  if (pid < 0) throw Error(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    // Own process group, so stop() also reaches children the shell forks.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    std::string command = "exec " + options_.command;
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
  if (starts_++ > 0) ++restarts_;

  try {
    write_line(json{{"type", "hello"}, {"protocol", kScorerProtocol}}.dump());
    std::string line = read_line(std::chrono::steady_clock::now() + options_.timeout);
    json reply = json::parse(line, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || reply.value("type", "") != "ready" ||
        !reply.contains("name") || !reply["name"].is_string()) {
      throw ProtocolError("bad handshake reply: " + line);
    }
    name_ = reply["name"].get<std::string>();
  } catch (...) {
    stop();
    throw;
  }
}

void ExternalScorer::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);
    kill(pid_, SIGKILL);
    int status = 0;
    while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
  }
  pid_ = -1;
  buffer_.clear();
}

void ExternalScorer::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StreamBroken("scorer closed its input");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ExternalScorer::read_line(std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    auto eol = buffer_.find('\n');
    if (eol != std::string::npos) {
      std::string line = buffer_.substr(0, eol);
      buffer_.erase(0, eol + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TimeoutError("scorer did not reply within " + std::to_string(options_.timeout.count()) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("poll: ") + std::strerror(errno));
    }
    if (r == 0) continue;
    char chunk[65536];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StreamBroken("read from scorer failed");
    }
    if (n == 0) throw StreamBroken("scorer exited");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<double> ExternalScorer::score(const RankingExample& example) {
  start();
  try {
    write_line(score_request(example));
    std::string line = read_line(std::chrono::steady_clock::now() + options_.timeout);
    return parse_score_reply(line, example.example_id, example.candidates.size());
  } catch (const StreamBroken&) {
    stop();
    throw;
  } catch (const TimeoutError&) {
    stop();
    throw;
  }
}

std::string score_request(const RankingExample& example) {
  json candidates = json::array();
  for (const auto& c : example.candidates) candidates.push_back({{"section", c.section_title}, {"text", c.text}});
  json request{{"type", "score"},
               {"example_id", example.example_id},
               {"target",
                {{"title", example.target.title}, {"lead", example.target.lead}, {"mentions", example.target.mentions}}},
               {"candidates", std::move(candidates)}};
  return request.dump();
}

std::vector<double> parse_score_reply(std::string_view line, const std::string& example_id, std::size_t expected) {
  json reply = json::parse(line, nullptr, false);
  if (reply.is_discarded()) {
    std::string s(line);
    if (s.find("NaN") != std::string::npos || s.find("Infinity") != std::string::npos) {
      throw ProtocolError("non-finite score from scorer for " + example_id);
    }
    throw StreamBroken("malformed reply: " + s.substr(0, 200));
  }
  if (!reply.is_object() || reply.value("type", "") != "scores") {
    throw StreamBroken("unexpected reply type: " + std::string(line.substr(0, 200)));
  }
  if (!reply.contains("example_id") || !reply["example_id"].is_string() ||
      reply["example_id"].get<std::string>() != example_id) {
    throw StreamBroken("reply for a different example (expected " + example_id + ")");
  }
  if (!reply.contains("scores") || !reply["scores"].is_array()) throw ProtocolError("reply without scores array");
  const json& scores = reply["scores"];
  if (scores.size() != expected) {
    throw ProtocolError("score count mismatch for " + example_id + ": expected " + std::to_string(expected) +
                        ", got " + std::to_string(scores.size()));
  }
  std::vector<double> out;
  for (const auto& s : scores) {
    if (!s.is_number()) throw ProtocolError("non-finite score from scorer for " + example_id);
    double v = s.get<double>();
    if (!std::isfinite(v)) throw ProtocolError("non-finite score from scorer for " + example_id);
    out.push_back(v);
  }
  return out;
}

Ranking rank_external(const RankingExample& example, ExternalScorer& scorer) {
  std::string method = "external";
  auto scores = scorer.score(example);
  if (!scorer.name().empty()) method += ":" + scorer.name();
  return make_ranking(example.example_id, method, std::move(scores));
}

}  // namespace linkforge::rankers
