// Copyright 2026 The GLP Authors
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

// Messages exchanged with an out-of-process evaluator. Every message is one
// JSON object on one line, terminated by '\n'. See docs/wire_protocol.md.

#ifndef GLP_BRIDGE_WIRE_HPP_
#define GLP_BRIDGE_WIRE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "glp/core/topology.hpp"
#include "glp/metrics/metric.hpp"

namespace glp::bridge {

inline constexpr int kProtocolVersion = 1;

struct WireHyperparameters {
  double learning_rate = 2e-5;
  int batch_size = 32;
  int epochs = 3;
  int max_seq_len = 128;

  std::string canonical() const;
  bool operator==(const WireHyperparameters&) const = default;
};

// Opens a session in both directions. `agent` names the sender, e.g.
// "glp/0.1" or "echo-worker/1".
struct WireHello {
  int protocol = kProtocolVersion;
  std::string agent;

  bool operator==(const WireHello&) const = default;
};

struct WireRequest {
  std::uint64_t id = 0;
  std::string task;
  std::string locator;
  std::vector<LayerId> kept_layers;  // ascending
  std::uint64_t seed = 0;
  WireHyperparameters hyperparameters;
  MetricKind metric = MetricKind::kAccuracy;

  bool operator==(const WireRequest&) const = default;
};

enum class WireStatus { kOk, kFailed };

struct WireResponse {
  std::uint64_t id = 0;
  WireStatus status = WireStatus::kOk;
  // Finite whenever status is ok.
  double metric = 0.0;
  double validation_loss = 0.0;
  double wall_seconds = 0.0;
  std::string worker;
  std::string detail;

  bool operator==(const WireResponse&) const;
};

// A peer could not make sense of a line it received.
struct WireError {
  std::optional<std::uint64_t> id;
  std::string message;
  // Byte offset of the problem in the receiver's input stream.
  std::uint64_t offset = 0;

  bool operator==(const WireError&) const = default;
};

using WireMessage = std::variant<WireHello, WireRequest, WireResponse, WireError>;

// One line, '\n' included, with fields in a fixed order.
std::string encode(const WireMessage& message);

// Parses one line (without its '\n') that starts at byte `offset` of its
// stream. Unknown fields are ignored. Throws FormatError with the absolute
// offset of the problem for malformed JSON, a missing or mistyped field, an
// unknown message type, unsorted kept layers, an ok response carrying a
// non-finite metric, or a protocol version other than kProtocolVersion.
WireMessage decode(std::string_view line, std::size_t offset = 0);

// The "id" of a line that decode() rejected, when it is still readable, so
// the error reply can name the request it refuses.
std::optional<std::uint64_t> salvage_id(std::string_view line);

// Splits a byte stream into lines, remembering where each one began.
class LineReader {
 public:
  struct Line {
    std::string text;  // without '\n'
    std::size_t offset = 0;
  };

  void feed(std::string_view bytes);
  std::optional<Line> next();
  // Call at end of stream; throws FormatError if a line was cut short.
  void finish() const;
  std::size_t consumed() const { return consumed_; }

 private:
  std::string buffer_;
  std::size_t buffer_offset_ = 0;  // stream offset of buffer_[0]
  std::size_t consumed_ = 0;
};

// Request ids of one session: each may be opened once and closed once.
class IdRegistry {
 public:
  // Throws FormatError (at `offset`) if `id` was ever opened before.
  void open(std::uint64_t id, std::size_t offset = 0);
  // False if `id` is not pending.
  bool close(std::uint64_t id);
  bool pending(std::uint64_t id) const { return pending_.contains(id); }
  std::size_t pending_count() const { return pending_.size(); }

 private:
  std::set<std::uint64_t> seen_;
  std::set<std::uint64_t> pending_;
};

}  // namespace glp::bridge

#endif  // GLP_BRIDGE_WIRE_HPP_
