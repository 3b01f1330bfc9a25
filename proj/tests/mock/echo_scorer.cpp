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

// Test double for the external scorer protocol. Scores candidate i with i.
//
// Usage: echo_scorer [mode]
//   echo           well-behaved (default)
//   short          one score too few
//   nan            writes a NaN token
//   null           writes null as a score
//   wrong_id       replies with another example id
//   malformed      replies with a truncated line
//   hang:N         never answers request N (1-based)
//   exit:N         exits before answering request N
//   bad_handshake  replies to hello with garbage
#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

using json = nlohmann::json;

int main(int argc, char** argv) {
  std::string mode = argc > 1 ? argv[1] : "echo";
  long trigger = 0;
  if (auto colon = mode.find(':'); colon != std::string::npos) {
    trigger = std::stol(mode.substr(colon + 1));
    mode = mode.substr(0, colon);
  }
  std::string line;
  if (!std::getline(std::cin, line)) return 1;
  json hello = json::parse(line);
  if (hello.value("protocol", "") != "linkforge-scorer/1") return 1;
  if (mode == "bad_handshake") {
    std::cout << "{\"type\":\"nope\"}" << std::endl;
    return 0;
  }
  std::cout << json{{"type", "ready"}, {"name", "echo"}}.dump() << std::endl;

  long n = 0;
  while (std::getline(std::cin, line)) {
    ++n;
    json request = json::parse(line);
    std::string id = request["example_id"];
    std::size_t d = request["candidates"].size();
    if (mode == "hang" && n == trigger) {
      std::this_thread::sleep_for(std::chrono::hours(1));
    }
    if (mode == "exit" && n == trigger) return 3;
    json scores = json::array();
    for (std::size_t i = 0; i < d; ++i) scores.push_back(static_cast<double>(i));
    if (mode == "short" && !scores.empty()) scores.erase(scores.size() - 1);
    if (mode == "null" && !scores.empty()) scores[0] = nullptr;
    if (mode == "wrong_id") id += "-other";
    std::string out = json{{"type", "scores"}, {"example_id", id}, {"scores", scores}}.dump();
    if (mode == "nan") {
      auto at = out.find("[0");
      if (at != std::string::npos) out.replace(at + 1, 1, "NaN");
    }
    if (mode == "malformed") out = out.substr(0, out.size() / 2);
    std::cout << out << std::endl;
  }
  return 0;
}
