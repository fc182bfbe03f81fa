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

#ifndef GLP_BRIDGE_SESSION_HPP_
#define GLP_BRIDGE_SESSION_HPP_

#include <sys/types.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "glp/bridge/wire.hpp"
#include "glp/error.hpp"

namespace glp::bridge {

// The worker process went away or its pipes broke. Retrying on a fresh
// worker may help; see RemoteOracle.
class TransportError : public OracleError {
 public:
  using OracleError::OracleError;
};

// A worker program and its arguments; argv[0] is looked up in PATH.
struct WorkerCommand {
  std::vector<std::string> argv;

  std::string display() const;
};

// One worker process speaking the wire protocol over its stdin/stdout.
//
// Thread-safe: several threads may submit() and wait() at once, which
// pipelines their requests; responses are matched by id, in any order.
class Session {
 public:
  // Spawns the worker and exchanges hellos. Throws TransportError if the
  // worker cannot be started or dies, FormatError on a version mismatch or
  // a malformed hello, OracleError if no hello arrives within
  // `handshake_timeout`.
  explicit Session(const WorkerCommand& command,
                   std::chrono::milliseconds handshake_timeout = std::chrono::seconds(10));
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Assigns request.id and sends it; returns the id.
  std::uint64_t submit(WireRequest request);
  // The response to `id`, or nullopt once `timeout` passes; a late response
  // is then discarded. Throws TransportError if the worker exits first.
  std::optional<WireResponse> wait(std::uint64_t id, std::chrono::milliseconds timeout);

  // Sends raw bytes, bypassing the encoder. For protocol tests.
  void send_raw(const std::string& bytes);

  const std::string& worker_agent() const { return agent_; }
  bool alive() const;
  // Lines from the worker that could not be used, with their offsets. The
  // session keeps running past them.
  std::vector<std::string> protocol_errors() const;
  pid_t pid() const { return pid_; }

 private:
  void shutdown();
  void reader_loop();
  void write_all(const std::string& bytes);
  void handle_line(const LineReader::Line& line);

  pid_t pid_ = -1;
  int to_worker_ = -1;
  int from_worker_ = -1;
  std::string agent_;
  std::thread reader_;
  std::atomic<bool> stopping_{false};

  std::mutex write_mu_;
  mutable std::mutex mu_;
  std::condition_variable changed_;
  bool closed_ = false;  // worker stdout reached EOF or failed
  std::string close_reason_;
  std::optional<WireHello> hello_;
  std::uint64_t next_id_ = 1;
  IdRegistry ids_;
  std::set<std::uint64_t> abandoned_;
  std::map<std::uint64_t, WireResponse> arrived_;
  std::vector<std::string> errors_;
  std::optional<FormatError> handshake_error_;
};

}  // namespace glp::bridge

#endif  // GLP_BRIDGE_SESSION_HPP_
