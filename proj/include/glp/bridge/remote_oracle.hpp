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

#ifndef GLP_BRIDGE_REMOTE_ORACLE_HPP_
#define GLP_BRIDGE_REMOTE_ORACLE_HPP_

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "glp/bridge/session.hpp"
#include "glp/core/oracle.hpp"

namespace glp::bridge {

struct BridgeOptions {
  WorkerCommand command;
  WireHyperparameters hyperparameters;
  // Per request; an overdue request becomes a failed trial.
  std::chrono::milliseconds timeout{std::chrono::minutes(30)};
  std::chrono::milliseconds handshake_timeout{std::chrono::seconds(30)};
  // Worker processes to run; concurrent evaluate() calls spread over them
  // and pipeline within each.
  int workers = 1;
};

// A ScoreOracle served by external worker processes.
//
// A request lost to a broken transport is retried once on a restarted
// worker; if that fails too, TransportError (an OracleError) stops the
// search. Evaluation failures reported by the worker are never retried.
class RemoteOracle : public ScoreOracle {
 public:
  // Starts the workers eagerly so that a bad command fails here.
  explicit RemoteOracle(BridgeOptions options);

  Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec& task,
                      std::uint64_t seed) const override;
  std::string kind() const override { return "bridge"; }
  // Hyperparameters, timeout and worker command.
  std::string hyperparameters() const override;

  // Worker restarts after transport failures.
  int restarts() const { return restarts_.load(); }
  const BridgeOptions& options() const { return options_; }

 private:
  struct Slot {
    std::mutex mu;
    std::shared_ptr<Session> session;
  };

  std::shared_ptr<Session> session_for(Slot& slot) const;
  void replace(Slot& slot, const std::shared_ptr<Session>& broken) const;

  BridgeOptions options_;
  std::vector<std::unique_ptr<Slot>> slots_;
  mutable std::atomic<std::size_t> next_slot_{0};
  mutable std::atomic<int> restarts_{0};
};

}  // namespace glp::bridge

#endif  // GLP_BRIDGE_REMOTE_ORACLE_HPP_
