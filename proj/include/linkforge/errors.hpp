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
#include <stdexcept>
#include <string>

namespace linkforge {

// Base class for all recoverable errors raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. `offset` is a byte offset into the offending line or
// markup buffer.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset)
      : Error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A record violates one of its type invariants. `invariant` names it, e.g.
// "missing qid" or "empty span".
class InvariantError : public Error {
 public:
  explicit InvariantError(std::string invariant, const std::string& detail = "")
      : Error(detail.empty() ? "invariant violated: " + invariant
                             : "invariant violated: " + invariant + ": " + detail),
        invariant_(std::move(invariant)) {}

  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

// A well-formed input that cannot be processed, e.g. a link that is not
// localizable in its history. `reason` is a short stable tag.
class DataError : public Error {
 public:
  DataError(std::string reason, const std::string& detail = "")
      : Error(detail.empty() ? reason : reason + ": " + detail),
        reason_(std::move(reason)) {}

  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

// The external scorer broke the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

// A config file or command line that cannot be honored.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace linkforge
