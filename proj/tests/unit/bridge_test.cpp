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

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "glp/bridge/remote_oracle.hpp"
#include "glp/bridge/session.hpp"
#include "glp/bridge/wire.hpp"
#include "glp/core/hashed_oracle.hpp"
#include "glp/core/search.hpp"
#include "glp/error.hpp"
#include "glp/orchestrator/ledger_io.hpp"
#include "glp/orchestrator/runner.hpp"
#include "glp/orchestrator/scheduler.hpp"
#include "mock_oracles.hpp"

namespace glp::bridge {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using testing_support::FunctionOracle;
using testing_support::mock_task;

const std::string kWorker = GLP_ECHO_WORKER;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("glp_bridge_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

WorkerCommand echo(std::vector<std::string> args = {}) {
  WorkerCommand c{{kWorker}};
  c.argv.insert(c.argv.end(), args.begin(), args.end());
  return c;
}

WireRequest random_request(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> depth(1, 24);
  std::bernoulli_distribution keep(0.6);
  WireRequest r;
  r.id = rng();
  r.task = "task-" + std::to_string(rng() % 100);
  r.locator = rng() % 2 ? "glue:cola" : "";
  const int d = depth(rng);
  for (LayerId i = 0; i < d; ++i) {
    if (keep(rng)) r.kept_layers.push_back(i);
  }
  r.seed = rng();
  r.hyperparameters.learning_rate = std::uniform_real_distribution<double>(1e-6, 1e-2)(rng);
  r.hyperparameters.batch_size = static_cast<int>(rng() % 64) + 1;
  r.hyperparameters.epochs = static_cast<int>(rng() % 10) + 1;
  r.hyperparameters.max_seq_len = static_cast<int>(rng() % 512) + 1;
  r.metric = static_cast<MetricKind>(rng() % 5);
  return r;
}

TEST(Wire, RandomRequestsRoundTrip) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const WireRequest r = random_request(rng);
    const std::string line = encode(r);
    ASSERT_EQ(line.back(), '\n');
    ASSERT_EQ(line.find('\n'), line.size() - 1);
    EXPECT_EQ(std::get<WireRequest>(decode(line.substr(0, line.size() - 1))), r);
  }
}

TEST(Wire, ResponsesRoundTripIncludingNonFinite) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 10);
  for (int i = 0; i < 200; ++i) {
    WireResponse r;
    r.id = rng();
    r.metric = n(rng);
    r.validation_loss = i % 7 == 0 ? std::nan("") : n(rng);
    r.wall_seconds = std::abs(n(rng));
    r.worker = "w" + std::to_string(i);
    r.detail = i % 3 == 0 ? "line\nbreak \"quoted\"" : "";
    if (i % 5 == 0) {
      r.status = WireStatus::kFailed;
      r.metric = kFailedScore;
    }
    const std::string line = encode(r);
    EXPECT_EQ(std::get<WireResponse>(decode(line.substr(0, line.size() - 1))), r);
  }
  const WireError e{std::nullopt, "bad", 12};
  EXPECT_EQ(std::get<WireError>(decode(encode(e).substr(0, encode(e).size() - 1))), e);
}

TEST(Wire, UnknownFieldsAreDropped) {
  const std::string line =
      R"({"type":"result","id":4,"status":"ok","metric":0.5,"validation_loss":0.1,)"
      R"("wall_seconds":2,"worker":"w","gpu":"A100","extra":{"nested":[1,2]}})";
  const WireResponse r = std::get<WireResponse>(decode(line));
  EXPECT_EQ(r.id, 4u);
  EXPECT_EQ(r.metric, 0.5);
  EXPECT_EQ(r.detail, "");
  EXPECT_EQ(encode(r).find("gpu"), std::string::npos);
}

std::size_t offset_of_error(const std::string& line, std::size_t base) {
  try {
    decode(line, base);
  } catch (const FormatError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "accepted: " << line;
  return 0;
}

TEST(Wire, MalformedLinesNameTheirOffset) {
  EXPECT_EQ(offset_of_error("garbage", 100), 100u);
  EXPECT_EQ(offset_of_error(R"({"type":"hello","protocol":1,"agent":)", 0), 37u);
  const std::string wrong_version = R"({"type":"hello","protocol":9,"agent":"x"})";
  EXPECT_EQ(offset_of_error(wrong_version, 50), 50u + wrong_version.find("\"protocol\""));
  const std::string unknown = R"({"type":"shutdown"})";
  EXPECT_EQ(offset_of_error(unknown, 0), unknown.find("\"type\""));
  const std::string float_id =
      R"({"type":"result","id":1.5,"status":"ok","metric":0,"validation_loss":0,"wall_seconds":0,"worker":""})";
  EXPECT_EQ(offset_of_error(float_id, 0), float_id.find("\"id\""));
  const std::string inf_ok =
      R"({"type":"result","id":1,"status":"ok","metric":"-inf","validation_loss":0,"wall_seconds":0,"worker":""})";
  EXPECT_EQ(offset_of_error(inf_ok, 0), inf_ok.find("\"metric\""));
  const std::string missing = R"({"type":"error","id":null,"message":"m"})";
  EXPECT_EQ(offset_of_error(missing, 0), 0u);
  EXPECT_EQ(offset_of_error("[1,2]", 5), 5u);
  EXPECT_EQ(salvage_id(float_id), std::nullopt);
  EXPECT_EQ(salvage_id(inf_ok), 1u);
  EXPECT_EQ(salvage_id("garbage"), std::nullopt);
}

TEST(Wire, LineReaderTracksOffsetsAndTruncation) {
  LineReader r;
  r.feed("ab");
  EXPECT_FALSE(r.next());
  r.feed("c\nde\r\nf");
  auto first = r.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->text, "abc");
  EXPECT_EQ(first->offset, 0u);
  auto second = r.next();
  ASSERT_TRUE(second);
  EXPECT_EQ(second->text, "de");
  EXPECT_EQ(second->offset, 4u);
  EXPECT_FALSE(r.next());
  try {
    r.finish();
    FAIL() << "truncated line accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
  r.feed("\n");
  ASSERT_TRUE(r.next());
  EXPECT_NO_THROW(r.finish());
}

TEST(Wire, DuplicateIdsAreRejected) {
  IdRegistry ids;
  ids.open(1);
  ids.open(2);
  EXPECT_THROW(ids.open(1, 40), FormatError);
  EXPECT_TRUE(ids.close(1));
  EXPECT_FALSE(ids.close(1));
  EXPECT_THROW(ids.open(1), FormatError);
  EXPECT_EQ(ids.pending_count(), 1u);
}

struct Transcript {
  std::vector<std::string> args;
  std::vector<std::pair<std::string, std::string>> sent;  // marker, line
  std::vector<std::string> received;
};

Transcript load_transcript() {
  Transcript t;
  std::ifstream in(GLP_WIRE_FIXTURE);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# args:", 0) == 0) {
      std::istringstream words(line.substr(7));
      std::string w;
      while (words >> w) t.args.push_back(w);
    } else if (line.rfind("< ", 0) == 0) {
      t.received.push_back(line.substr(2));
    } else if (!line.empty() && line[0] == '>') {
      const std::size_t space = line.find(' ');
      t.sent.emplace_back(line.substr(0, space), line.substr(space + 1));
    }
  }
  return t;
}

TEST(GoldenTranscript, CleanLinesRoundTripByteForByte) {
  const Transcript t = load_transcript();
  ASSERT_EQ(t.sent.size(), 8u);
  ASSERT_EQ(t.received.size(), t.sent.size());
  for (const auto& [marker, line] : t.sent) {
    if (marker != ">") continue;
    EXPECT_EQ(encode(decode(line)), line + "\n");
  }
  for (const std::string& line : t.received) {
    EXPECT_EQ(encode(decode(line)), line + "\n");
  }
}

TEST(GoldenTranscript, EchoWorkerReproducesIt) {
  const Transcript t = load_transcript();
  TempDir dir;
  {
    std::ofstream in(dir / "in", std::ios::binary);
    for (const auto& entry : t.sent) in << entry.second << "\n";
  }
  std::string cmd = kWorker;
  for (const std::string& a : t.args) cmd += " " + a;
  cmd += " < " + (dir / "in").string() + " > " + (dir / "out").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::string expected;
  for (const std::string& line : t.received) expected += line + "\n";
  EXPECT_EQ(slurp(dir / "out"), expected);
}

TEST(Session, HandshakeNamesWorker) {
  Session s(echo());
  EXPECT_EQ(s.worker_agent(), "echo-worker/1");
  EXPECT_TRUE(s.alive());
}

TEST(Session, VersionMismatchRefused) {
  EXPECT_THROW(Session(echo({"--protocol", "2"})), FormatError);
}

TEST(Session, MissingProgramIsATransportError) {
  EXPECT_THROW(Session(WorkerCommand{{"/nonexistent/glp-worker"}}), TransportError);
}

TEST(Session, PipelinedResponsesMatchedById) {
  Session s(echo({"--swap-pairs", "--fn-seed", "5"}));
  WireRequest a;
  a.kept_layers = {0, 1, 2};
  WireRequest b;
  b.kept_layers = {1};
  const std::uint64_t ia = s.submit(a);
  const std::uint64_t ib = s.submit(b);
  EXPECT_NE(ia, ib);
  const auto rb = s.wait(ib, 5s);
  const auto ra = s.wait(ia, 5s);
  ASSERT_TRUE(ra && rb);
  EXPECT_EQ(ra->id, ia);
  EXPECT_EQ(rb->id, ib);
  EXPECT_EQ(ra->metric, hashed_score(a.kept_layers, 5));
  EXPECT_EQ(rb->metric, hashed_score(b.kept_layers, 5));
}

TEST(Session, GarbageFromWorkerIsSurvived) {
  Session s(echo({"--noise"}));
  WireRequest r;
  r.kept_layers = {0, 3};
  for (int i = 0; i < 3; ++i) {
    const auto got = s.wait(s.submit(r), 5s);
    ASSERT_TRUE(got);
    EXPECT_EQ(got->metric, hashed_score(r.kept_layers, 0));
  }
  const auto errors = s.protocol_errors();
  ASSERT_EQ(errors.size(), 3u);
  EXPECT_NE(errors[0].find("byte offset"), std::string::npos);
  EXPECT_TRUE(s.alive());
}

TEST(Session, GarbageToWorkerIsAnswered) {
  Session s(echo());
  s.send_raw("{\"type\":\"evaluate\",\"protocol\":1,\"id\":77,\"kept_layers\":[3,1]}\n");
  WireRequest r;
  r.kept_layers = {0};
  // The worker keeps serving after rejecting the malformed request.
  ASSERT_TRUE(s.wait(s.submit(r), 5s));
  EXPECT_EQ(s.protocol_errors().size(), 1u);
  EXPECT_NE(s.protocol_errors()[0].find("id 77"), std::string::npos);
}

TEST(Session, TimeoutThenLateResponseIsDiscarded) {
  Session s(echo({"--delay-ms", "300"}));
  WireRequest r;
  r.kept_layers = {0};
  const std::uint64_t id = s.submit(r);
  EXPECT_FALSE(s.wait(id, 50ms));
  const auto next = s.wait(s.submit(r), 5s);
  ASSERT_TRUE(next);
  EXPECT_NE(next->id, id);
  EXPECT_TRUE(s.protocol_errors().empty());
}

TEST(Session, WorkerExitIsATransportError) {
  Session s(echo({"--exit-after", "1"}));
  WireRequest r;
  r.kept_layers = {0};
  const std::uint64_t id = s.submit(r);
  EXPECT_THROW(s.wait(id, 5s), TransportError);
  EXPECT_FALSE(s.alive());
  EXPECT_THROW(s.submit(r), TransportError);
}

BridgeOptions options(std::vector<std::string> args, int workers = 1) {
  BridgeOptions o;
  o.command = echo(std::move(args));
  o.workers = workers;
  o.timeout = 5s;
  return o;
}

TEST(RemoteOracle, ScoresThroughWorker) {
  const RemoteOracle oracle(options({"--fn-seed", "9"}));
  const std::vector<LayerId> kept = {0, 2, 5};
  const Evaluation e = oracle.evaluate(kept, mock_task(), 1);
  EXPECT_TRUE(e.ok);
  EXPECT_EQ(e.metric, hashed_score(kept, 9));
  EXPECT_EQ(e.validation_loss, 1.0 - e.metric);
  EXPECT_EQ(oracle.kind(), "bridge");
  EXPECT_NE(oracle.fingerprint(), RemoteOracle(options({"--fn-seed", "8"})).fingerprint());
}

TEST(RemoteOracle, FailedTrialIsNotRetried) {
  const RemoteOracle oracle(options({"--fail-seed", "4"}));
  const std::vector<LayerId> kept = {0};
  const Evaluation e = oracle.evaluate(kept, mock_task(), 4);
  EXPECT_FALSE(e.ok);
  EXPECT_EQ(e.detail, "refused seed 4");
  EXPECT_EQ(oracle.restarts(), 0);
}

TEST(RemoteOracle, RetriesOnceOnATransportFailure) {
  TempDir dir;
  const RemoteOracle oracle(
      options({"--exit-after", "2", "--once-marker", (dir / "crashed").string()}));
  const std::vector<LayerId> kept = {0, 1};
  EXPECT_TRUE(oracle.evaluate(kept, mock_task(), 1).ok);
  EXPECT_TRUE(oracle.evaluate(kept, mock_task(), 2).ok);
  EXPECT_EQ(oracle.restarts(), 1);
}

TEST(RemoteOracle, SecondTransportFailureStopsTheSearch) {
  const RemoteOracle oracle(options({"--exit-after", "1"}));
  const std::vector<LayerId> kept = {0};
  EXPECT_THROW(oracle.evaluate(kept, mock_task(), 1), OracleError);
  EXPECT_EQ(oracle.restarts(), 1);
}

TEST(RemoteOracle, TimeoutBecomesJournaledFailure) {
  BridgeOptions o = options({"--hang-seed", "7"});
  o.timeout = 200ms;
  const RemoteOracle oracle(o);
  TempDir dir;
  const TaskSpec task = mock_task();
  {
    ResultCache cache(dir / "journal");
    Scheduler s(oracle, task, cache, 1);
    const KeptLayers kept = {0, 1};
    const std::vector<EvalRequest> requests = {s.request(kept, 7), s.request(kept, 8)};
    const auto results = s.run_step(requests);
    EXPECT_FALSE(results[0].ok());
    EXPECT_NE(results[0].detail.find("no response"), std::string::npos);
    EXPECT_TRUE(results[1].ok());
  }
  const ResultCache replayed(dir / "journal");
  ASSERT_EQ(replayed.size(), 2u);
  int failed = 0;
  for (const auto& [key, r] : replayed.entries()) failed += r.ok() ? 0 : 1;
  EXPECT_EQ(failed, 1);
}

// Same scores as the echo worker, computed in process.
FunctionOracle in_process(std::uint64_t fn_seed) {
  return FunctionOracle(
      [fn_seed](std::span<const LayerId> kept) { return hashed_score(kept, fn_seed); });
}

void expect_same_search(const PruneLedger& a, const PruneLedger& b) {
  EXPECT_EQ(a.chain(), b.chain());
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    EXPECT_EQ(a.steps[k].candidates, b.steps[k].candidates) << "step " << k + 1;
  }
  EXPECT_EQ(a.subsets, b.subsets);
}

TEST(Conformance, SearchOverBridgeEqualsInProcess) {
  const TaskSpec task = mock_task();
  const LayerTopology topology(8);
  for (std::uint64_t fn_seed : {1u, 2u, 3u}) {
    const RemoteOracle remote(options({"--fn-seed", std::to_string(fn_seed)}, 2));
    const FunctionOracle local = in_process(fn_seed);
    ResultCache cache;
    Scheduler s(remote, task, cache, 2);
    RunOptions opts;
    opts.n = 5;
    opts.seed = 4;
    expect_same_search(run_search(topology, s, opts), glp_search(topology, task, 5, local, 4));
    opts.algorithm = Algorithm::kOptimal;
    opts.n = 2;
    expect_same_search(run_search(topology, s, opts),
                       optimal_ledger(topology, task, "x", 2, 4,
                                      optimal_search(topology, task, 2, local, 4)));
  }
}

TEST(Conformance, DeadWorkerHaltsResumably) {
  const TaskSpec task = mock_task();
  const LayerTopology topology(8);
  TempDir dir;
  RunOptions opts;
  opts.n = 3;
  opts.seed = 1;
  opts.ledger_path = dir / "ledger.json";
  // While the flag file exists the worker dies as soon as a second layer is
  // pruned, restart or not; the command line, hence the fingerprint, stays.
  const std::vector<std::string> args = {"--die-below", "7", "--die-flag",
                                         (dir / "broken").string()};
  std::ofstream(dir / "broken") << "x";
  {
    const RemoteOracle dying(options(args));
    ResultCache cache(dir / "journal");
    Scheduler s(dying, task, cache, 1);
    EXPECT_THROW(run_search(topology, s, opts), OracleError);
  }
  EXPECT_EQ(resume(dir / "ledger.json").ledger.steps.size(), 1u);
  EXPECT_EQ(ResultCache(dir / "journal").size(), 8u);

  fs::remove(dir / "broken");
  const RemoteOracle healthy(options(args));
  ResultCache cache(dir / "journal");
  Scheduler s(healthy, task, cache, 1);
  const PruneLedger resumed = run_search(topology, s, opts);
  // Only steps 2 and 3 were evaluated on the healthy worker.
  EXPECT_EQ(s.oracle_calls(), 7u + 6u);
  const FunctionOracle local = in_process(0);
  expect_same_search(resumed, glp_search(topology, task, 3, local, 1));
}

}  // namespace
}  // namespace glp::bridge
