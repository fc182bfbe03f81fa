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

#include "glp/bridge/remote_oracle.hpp"

#include <algorithm>

namespace glp::bridge {

RemoteOracle::RemoteOracle(BridgeOptions options) : options_(std::move(options)) {
  if (options_.workers < 1) throw InvalidRequest("bridge needs at least one worker");
  if (options_.timeout.count() <= 0) throw InvalidRequest("bridge timeout must be positive");
  for (int i = 0; i < options_.workers; ++i) {
    auto slot = std::make_unique<Slot>();
    slot->session = std::make_shared<Session>(options_.command, options_.handshake_timeout);
    slots_.push_back(std::move(slot));
  }
}

std::shared_ptr<Session> RemoteOracle::session_for(Slot& slot) const {
  std::lock_guard lock(slot.mu);
  return slot.session;
}

void RemoteOracle::replace(Slot& slot, const std::shared_ptr<Session>& broken) const {
  std::lock_guard lock(slot.mu);
  // Another caller may have restarted it already.
  if (slot.session != broken) return;
  slot.session = std::make_shared<Session>(options_.command, options_.handshake_timeout);
  ++restarts_;
}

Evaluation RemoteOracle::evaluate(std::span<const LayerId> kept, const TaskSpec& task,
                                  std::uint64_t seed) const {
  WireRequest request;
  request.task = task.name;
  request.locator = task.locator;
  request.kept_layers.assign(kept.begin(), kept.end());
  std::sort(request.kept_layers.begin(), request.kept_layers.end());
  request.seed = seed;
  request.hyperparameters = options_.hyperparameters;
  request.metric = task.metric;

  Slot& slot = *slots_[next_slot_.fetch_add(1) % slots_.size()];
  std::optional<WireResponse> response;
  for (int attempt = 0;; ++attempt) {
    std::shared_ptr<Session> session = session_for(slot);
    try {
      const std::uint64_t id = session->submit(request);
      response = session->wait(id, options_.timeout);
      break;
    } catch (const TransportError&) {
      if (attempt > 0) throw;
      replace(slot, session);
    }
  }
  if (!response) {
    return Evaluation::failed("no response within " +
                              std::to_string(options_.timeout.count()) + " ms");
  }
  if (response->status == WireStatus::kFailed) {
    Evaluation e = Evaluation::failed(response->detail);
    e.validation_loss = response->validation_loss;
    return e;
  }
  Evaluation e;
  e.metric = response->metric;
  e.validation_loss = response->validation_loss;
  e.detail = response->worker;
  return e;
}

std::string RemoteOracle::hyperparameters() const {
  return options_.hyperparameters.canonical() +
         ";timeout_ms=" + std::to_string(options_.timeout.count()) +
         ";worker=" + options_.command.display();
}

}  // namespace glp::bridge
