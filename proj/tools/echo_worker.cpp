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

// Mock evaluator speaking the worker side of the wire protocol. It answers
// every request with hashed_score() of the kept layers; flags inject the
// misbehaviour the bridge must survive.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "glp/bridge/wire.hpp"
#include "glp/core/hashed_oracle.hpp"
#include "glp/error.hpp"

namespace {

using namespace glp;
using namespace glp::bridge;

constexpr const char* kAgent = "echo-worker/1";

struct Options {
  std::uint64_t fn_seed = 0;
  int delay_ms = 0;
  int protocol = kProtocolVersion;
  int exit_after = 0;
  std::size_t die_below = 0;
  std::string die_flag;
  std::string once_marker;
  std::optional<std::uint64_t> hang_seed;
  std::optional<std::uint64_t> fail_seed;
  bool swap_pairs = false;
  bool noise = false;
};

void send(const WireMessage& m) {
  std::cout << encode(m) << std::flush;
}

WireResponse answer(const WireRequest& r, const Options& o) {
  if (o.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(o.delay_ms));
  WireResponse out;
  out.id = r.id;
  out.worker = kAgent;
  if (o.fail_seed && r.seed == *o.fail_seed) {
    out.status = WireStatus::kFailed;
    out.metric = kFailedScore;
    out.validation_loss = std::numeric_limits<double>::quiet_NaN();
    out.detail = "refused seed " + std::to_string(r.seed);
    return out;
  }
  out.metric = hashed_score(r.kept_layers, o.fn_seed);
  out.validation_loss = 1.0 - out.metric;
  out.wall_seconds = o.delay_ms / 1000.0;
  return out;
}

// Exits without answering on the n-th request, once per marker file.
bool should_crash(const Options& o, int requests_seen) {
  if (o.exit_after <= 0 || requests_seen != o.exit_after) return false;
  if (o.once_marker.empty()) return true;
  if (std::filesystem::exists(o.once_marker)) return false;
  std::ofstream(o.once_marker) << "crashed\n";
  return true;
}

int serve(const Options& o) {
  IdRegistry ids;
  std::optional<WireResponse> held;
  bool greeted = false;
  int requests_seen = 0;
  std::size_t offset = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    const std::size_t at = offset;
    offset += line.size() + 1;
    WireMessage message;
    try {
      message = decode(line, at);
    } catch (const FormatError& e) {
      send(WireError{salvage_id(line), e.reason(), e.offset()});
      continue;
    }
    if (const auto* h = std::get_if<WireHello>(&message)) {
      send(WireHello{o.protocol, kAgent});
      greeted = h->protocol == kProtocolVersion;
      continue;
    }
    const auto* r = std::get_if<WireRequest>(&message);
    if (r == nullptr) {
      send(WireError{std::nullopt, "workers accept hello and evaluate only", at});
      continue;
    }
    if (!greeted) {
      send(WireError{r->id, "evaluate before hello", at});
      continue;
    }
    try {
      ids.open(r->id, at);
    } catch (const FormatError& e) {
      send(WireError{r->id, e.reason(), e.offset()});
      continue;
    }
    if (should_crash(o, ++requests_seen)) return 3;
    if (r->kept_layers.size() < o.die_below &&
        (o.die_flag.empty() || std::filesystem::exists(o.die_flag))) {
      return 4;
    }
    if (o.hang_seed && r->seed == *o.hang_seed) continue;
    WireResponse response = answer(*r, o);
    if (o.noise) std::cout << "not a message\n";
    if (o.swap_pairs && !held) {
      held = std::move(response);
      continue;
    }
    send(response);
    if (held) {
      send(*held);
      held.reset();
    }
  }
  if (held) send(*held);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wire-protocol worker that scores kept layers with a fixed hash function."};
  Options o;
  std::uint64_t hang = 0;
  std::uint64_t fail = 0;
  app.add_option("--fn-seed", o.fn_seed, "Seed of the scoring function");
  app.add_option("--delay-ms", o.delay_ms, "Sleep before every answer");
  app.add_option("--protocol", o.protocol, "Protocol version to announce");
  app.add_option("--exit-after", o.exit_after, "Exit without answering the n-th request");
  app.add_option("--once-marker", o.once_marker,
                 "With --exit-after: crash only if this file is absent, then create it");
  app.add_option("--die-below", o.die_below,
                 "Exit without answering when fewer layers than this are kept");
  app.add_option("--die-flag", o.die_flag, "Apply --die-below only while this file exists");
  auto* hang_opt = app.add_option("--hang-seed", hang, "Never answer requests with this seed");
  auto* fail_opt = app.add_option("--fail-seed", fail, "Report failed trials for this seed");
  app.add_flag("--swap-pairs", o.swap_pairs, "Answer each pair of requests in reverse order");
  app.add_flag("--noise", o.noise, "Emit a malformed line before every answer");
  CLI11_PARSE(app, argc, argv);
  if (*hang_opt) o.hang_seed = hang;
  if (*fail_opt) o.fail_seed = fail;
  return serve(o);
}
