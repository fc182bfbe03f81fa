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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "glp/core/search.hpp"
#include "glp/error.hpp"
#include "glp/orchestrator/ledger_io.hpp"
#include "glp/orchestrator/report.hpp"
#include "glp/orchestrator/result_cache.hpp"
#include "glp/orchestrator/runner.hpp"
#include "glp/orchestrator/scheduler.hpp"
#include "mock_oracles.hpp"

namespace glp {
namespace {

namespace fs = std::filesystem;
using testing_support::additive;
using testing_support::CrashingOracle;
using testing_support::FunctionOracle;
using testing_support::mock_task;
using testing_support::random_interacting;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("glp_orch_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
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

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Score shifts with the seed, so multi-seed aggregation is observable.
class SeededOracle : public ScoreOracle {
 public:
  explicit SeededOracle(std::vector<double> w) : fn_(additive(std::move(w))) {}
  Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec&,
                      std::uint64_t seed) const override {
    Evaluation e;
    e.metric = fn_(kept) + 0.01 * static_cast<double>(seed);
    e.validation_loss = 1.0 - e.metric;
    return e;
  }
  std::string kind() const override { return "mock"; }
  std::string hyperparameters() const override { return "seeded"; }

 private:
  testing_support::ScoreFn fn_;
};

// Reports a failed trial for every set lacking layer 0.
class PickyOracle : public ScoreOracle {
 public:
  Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec&,
                      std::uint64_t) const override {
    if (kept.empty() || kept.front() != 0) return Evaluation::failed("diverged");
    Evaluation e;
    e.metric = static_cast<double>(kept.size());
    return e;
  }
  std::string kind() const override { return "mock"; }
  std::string hyperparameters() const override { return "picky"; }
};

std::vector<EvalRequest> one_step_requests(const Scheduler& s, int depth) {
  const LayerTopology t(depth);
  std::vector<EvalRequest> out;
  for (LayerId id = 0; id < depth; ++id) {
    const std::vector<LayerId> pruned = {id};
    out.push_back(s.request(t.kept_after(pruned), 1));
  }
  return out;
}

TEST(Request, KeyDependsOnKeptSetOnly) {
  FunctionOracle oracle(additive({1, 2, 3, 4}));
  const TaskSpec task = mock_task();
  ResultCache cache;
  Scheduler s(oracle, task, cache, 1);
  const LayerTopology t(4);
  const std::vector<LayerId> a = {3, 1};
  const std::vector<LayerId> b = {1, 3};
  EXPECT_EQ(s.request(t.kept_after(a), 5).key(), s.request(t.kept_after(b), 5).key());
  EXPECT_NE(s.request(t.kept_after(a), 5).key(), s.request(t.kept_after(a), 6).key());
  EXPECT_NE(s.request(t.kept_after(a), 5).key(),
            Scheduler(oracle, mock_task("other"), cache, 1)
                .request(t.kept_after(a), 5)
                .key());
}

TEST(Request, ValidateRejectsBadSets) {
  FunctionOracle oracle(additive({1, 2, 3}));
  const TaskSpec task = mock_task();
  const std::vector<LayerId> good = {0, 2};
  const std::vector<LayerId> unsorted = {2, 0};
  const std::vector<LayerId> outside = {0, 3};
  EXPECT_NO_THROW(validate(EvalRequest::make(task, good, 1, oracle), 3));
  EXPECT_THROW(validate(EvalRequest::make(task, unsorted, 1, oracle), 3), InvalidRequest);
  EXPECT_THROW(validate(EvalRequest::make(task, outside, 1, oracle), 3), InvalidRequest);
  EXPECT_THROW(validate(EvalRequest::make(task, {}, 1, oracle), 3), InvalidRequest);
}

TEST(Scheduler, CachedStepMakesNoOracleCalls) {
  FunctionOracle oracle(additive({1, 2, 3, 4, 5, 6}));
  const TaskSpec task = mock_task();
  ResultCache cache;
  Scheduler s(oracle, task, cache, 3);
  const auto requests = one_step_requests(s, 6);
  const auto first = s.run_step(requests);
  EXPECT_EQ(oracle.calls(), 6);
  oracle.reset_calls();
  const auto second = s.run_step(requests);
  EXPECT_EQ(oracle.calls(), 0);
  EXPECT_EQ(first, second);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    EXPECT_EQ(first[i].key, requests[i].key());
    EXPECT_DOUBLE_EQ(first[i].metric.value, 21.0 - static_cast<double>(i + 1));
  }
}

TEST(Scheduler, DuplicatesShareOneCall) {
  FunctionOracle oracle(additive({1, 2, 3}));
  const TaskSpec task = mock_task();
  ResultCache cache;
  Scheduler s(oracle, task, cache, 4);
  const KeptLayers kept = {0, 2};
  const std::vector<EvalRequest> requests(5, s.request(kept, 9));
  const auto results = s.run_step(requests);
  EXPECT_EQ(oracle.calls(), 1);
  EXPECT_EQ(s.oracle_calls(), 1u);
  ASSERT_EQ(results.size(), 5u);
  for (const EvalResult& r : results) EXPECT_EQ(r, results[0]);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(Scheduler, RejectsZeroParallelism) {
  FunctionOracle oracle(additive({1, 2}));
  const TaskSpec task = mock_task();
  ResultCache cache;
  EXPECT_THROW(Scheduler(oracle, task, cache, 0), InvalidRequest);
}

double timed_step(int parallelism) {
  FunctionOracle oracle(additive(std::vector<double>(12, 1.0)));
  oracle.set_delay(std::chrono::milliseconds(1000));
  const TaskSpec task = mock_task();
  ResultCache cache;
  Scheduler s(oracle, task, cache, parallelism);
  const auto requests = one_step_requests(s, 12);
  const auto start = std::chrono::steady_clock::now();
  s.run_step(requests);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TEST(SchedulerTiming, TwelveParallelSleepsTakeAboutOne) {
  EXPECT_LT(timed_step(12), 2.0);
}

TEST(SchedulerTiming, TwelveSerialSleepsTakeTwelve) {
  EXPECT_GE(timed_step(1), 12.0);
}

TEST(Scheduler, FailedTrialsAreResultsNotErrors) {
  PickyOracle oracle;
  const TaskSpec task = mock_task();
  ResultCache cache;
  Scheduler s(oracle, task, cache, 2);
  const auto results = s.run_step(one_step_requests(s, 4));
  EXPECT_FALSE(results[0].ok());
  EXPECT_EQ(results[0].metric.value, kFailedScore);
  EXPECT_EQ(results[0].detail, "diverged");
  for (std::size_t i = 1; i < 4; ++i) EXPECT_TRUE(results[i].ok());
  EXPECT_EQ(cache.size(), 4u);
}

TEST(Scheduler, OracleErrorRethrownAfterJournaling) {
  FunctionOracle inner(additive({1, 2, 3, 4, 5, 6}));
  CrashingOracle oracle(inner, 3);
  const TaskSpec task = mock_task();
  TempDir dir;
  {
    ResultCache cache(dir / "journal");
    Scheduler s(oracle, task, cache, 1);
    EXPECT_THROW(s.run_step(one_step_requests(s, 6)), OracleError);
    EXPECT_EQ(cache.size(), 3u);
  }
  EXPECT_EQ(ResultCache(dir / "journal").size(), 3u);
}

TEST(Scheduler, ScheduleIndependentLedgers) {
  std::mt19937_64 rng(42);
  FunctionOracle oracle(random_interacting(12, rng));
  const TaskSpec task = mock_task();
  const LayerTopology topology(12);
  std::string reference;
  for (int parallelism : {1, 4, 12}) {
    ResultCache cache;
    Scheduler s(oracle, task, cache, parallelism);
    RunOptions opts;
    opts.n = 5;
    opts.seed = 3;
    const std::string text = serialize_ledger(run_search(topology, s, opts));
    if (reference.empty()) reference = text;
    EXPECT_EQ(text, reference) << "parallelism " << parallelism;
  }
  // The same search straight through the core loop, without any scheduler.
  const PruneLedger direct = glp_search(topology, task, 5, oracle, 3);
  EXPECT_EQ(serialize_ledger(direct), reference);
}

TEST(Journal, ReplayReconstructsEntries) {
  PickyOracle oracle;
  const TaskSpec task = mock_task();
  TempDir dir;
  std::map<std::string, EvalResult> written;
  {
    ResultCache cache(dir / "journal");
    Scheduler s(oracle, task, cache, 2);
    s.run_step(one_step_requests(s, 5));
    written = cache.entries();
  }
  const ResultCache replayed(dir / "journal");
  EXPECT_EQ(replayed.entries(), written);
  EXPECT_EQ(replayed.torn_lines(), 0);
  // Replay is idempotent: opening again changes nothing on disk.
  const std::string before = slurp(dir / "journal");
  { ResultCache again(dir / "journal"); }
  EXPECT_EQ(slurp(dir / "journal"), before);
}

TEST(Journal, LineRoundTripKeepsNonFiniteValues) {
  EvalResult r;
  r.key = "task=x;kept=0;seed=1";
  r.status = EvalStatus::kFailed;
  r.metric = {kFailedScore, MetricKind::kF1};
  r.validation_loss = std::nan("");
  r.wall_seconds = 0.1 + 0.2;
  r.detail = "diverged at step 7";
  const std::string line = ResultCache::encode_line(r);
  ASSERT_EQ(line.back(), '\n');
  EXPECT_EQ(ResultCache::decode_line(line.substr(0, line.size() - 1), 0), r);
}

TEST(Journal, TornFinalLineIsDropped) {
  FunctionOracle oracle(additive({1, 2, 3, 4}));
  const TaskSpec task = mock_task();
  TempDir dir;
  {
    ResultCache cache(dir / "journal");
    Scheduler(oracle, task, cache, 1).run_step(one_step_requests(
        Scheduler(oracle, task, cache, 1), 4));
  }
  const std::string intact = slurp(dir / "journal");
  spit(dir / "journal", intact + "0badc0de {\"key\":\"half");
  const ResultCache cache(dir / "journal");
  EXPECT_EQ(cache.torn_lines(), 1);
  EXPECT_EQ(cache.size(), 4u);
  EXPECT_EQ(slurp(dir / "journal"), intact);
}

TEST(Journal, CorruptLineReportsItsOffset) {
  FunctionOracle oracle(additive({1, 2, 3, 4}));
  const TaskSpec task = mock_task();
  TempDir dir;
  {
    ResultCache cache(dir / "journal");
    Scheduler s(oracle, task, cache, 1);
    s.run_step(one_step_requests(s, 4));
  }
  std::string text = slurp(dir / "journal");
  const std::size_t second = text.find('\n') + 1;
  text[second + 20] = text[second + 20] == 'x' ? 'y' : 'x';
  spit(dir / "journal", text);
  try {
    ResultCache cache(dir / "journal");
    FAIL() << "corrupt journal accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), second);
  }
}

TEST(Journal, OkResultIsNeverOverwritten) {
  ResultCache cache;
  EvalResult failed;
  failed.key = "k";
  failed.status = EvalStatus::kFailed;
  failed.metric.value = kFailedScore;
  EvalResult ok = failed;
  ok.status = EvalStatus::kOk;
  ok.metric.value = 0.5;
  EvalResult other = ok;
  other.metric.value = 0.7;
  EXPECT_TRUE(cache.record(failed));
  EXPECT_FALSE(cache.record(failed));
  EXPECT_TRUE(cache.record(ok));
  EXPECT_FALSE(cache.record(other));
  EXPECT_FALSE(cache.record(failed));
  EXPECT_EQ(cache.find("k")->metric.value, 0.5);
}

TEST(LedgerIo, RoundTripIsByteIdentical) {
  FunctionOracle oracle(additive({0.3, -1, 0.2, 0.8, 0.1}));
  const TaskSpec task = mock_task();
  PruneLedger ledger = glp_search(LayerTopology(5), task, 3, oracle, 11);
  ledger.steps[1].candidates.begin()->second = kFailedScore;
  const std::string text = serialize_ledger(ledger);
  const PruneLedger back = parse_ledger(text);
  EXPECT_EQ(back, ledger);
  EXPECT_EQ(serialize_ledger(back), text);

  const OptimalResult best = optimal_search(LayerTopology(5), task, 2, oracle, 11);
  const PruneLedger opt =
      optimal_ledger(LayerTopology(5), task, oracle.fingerprint(), 2, 11, best);
  EXPECT_EQ(serialize_ledger(parse_ledger(serialize_ledger(opt))), serialize_ledger(opt));
  EXPECT_EQ(parse_ledger(serialize_ledger(opt)).subsets.size(), 10u);
}

TEST(LedgerIo, VersionMismatchNamesOffset) {
  FunctionOracle oracle(additive({1, 2, 3}));
  std::string text = serialize_ledger(glp_search(LayerTopology(3), mock_task(), 1, oracle, 0));
  const std::size_t at = text.find("\"schema_version\"");
  text.replace(text.find("1", at), 1, "7");
  try {
    parse_ledger(text);
    FAIL() << "future schema accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), at);
    EXPECT_NE(std::string(e.what()).find("version 7"), std::string::npos);
  }
}

TEST(LedgerIo, RejectsInconsistentChain) {
  FunctionOracle oracle(additive({1, 2, 3}));
  std::string text = serialize_ledger(glp_search(LayerTopology(3), mock_task(), 1, oracle, 0));
  EXPECT_THROW(parse_ledger(text.substr(0, text.size() / 2)), FormatError);
  const std::size_t chain = text.find("\"chain\"");
  const std::size_t digit = text.find_first_of("0123456789", chain);
  text[digit] = text[digit] == '2' ? '1' : '2';
  EXPECT_THROW(parse_ledger(text), FormatError);
}

// Runs greedy to n = 4 on depth 8, killing the oracle after `budget` calls
// and resuming until done. Returns the ledger file contents.
std::string kill_and_resume(const ScoreOracle& oracle, long budget,
                            const fs::path& dir) {
  const TaskSpec task = mock_task();
  const LayerTopology topology(8);
  RunOptions opts;
  opts.n = 4;
  opts.seed = 2;
  opts.ledger_path = dir / "ledger.json";
  {
    CrashingOracle crashing(oracle, budget);
    ResultCache cache(dir / "journal");
    Scheduler s(crashing, task, cache, 3);
    try {
      run_search(topology, s, opts);
    } catch (const OracleError&) {
    }
  }
  ResultCache cache(dir / "journal");
  Scheduler s(oracle, task, cache, 3);
  run_search(topology, s, opts);
  return slurp(dir / "ledger.json");
}

TEST(Resume, InterruptAfterStepTwoMatchesUninterrupted) {
  std::mt19937_64 rng(5);
  FunctionOracle oracle(random_interacting(8, rng));
  TempDir whole;
  TempDir broken;
  const std::string reference = kill_and_resume(oracle, 1000, whole.path());
  // Steps 1 and 2 cost 8 + 7 calls; the crash lands inside step 3.
  const TaskSpec task = mock_task();
  RunOptions opts;
  opts.n = 4;
  opts.seed = 2;
  opts.ledger_path = broken / "ledger.json";
  {
    CrashingOracle crashing(oracle, 17);
    ResultCache cache(broken / "journal");
    Scheduler s(crashing, task, cache, 3);
    EXPECT_THROW(run_search(LayerTopology(8), s, opts), OracleError);
  }
  const ResumePoint point = resume(broken / "ledger.json");
  ASSERT_TRUE(point.next_step.has_value());
  EXPECT_EQ(*point.next_step, 3);
  EXPECT_EQ(point.ledger.steps.size(), 2u);

  oracle.reset_calls();
  ResultCache cache(broken / "journal");
  Scheduler s(oracle, task, cache, 3);
  run_search(LayerTopology(8), s, opts);
  // Only the evaluations lost in flight are repeated.
  EXPECT_EQ(oracle.calls(), 6 + 5 - 2);
  EXPECT_EQ(slurp(broken / "ledger.json"), reference);
}

TEST(Resume, AnyKillPointGivesTheSameLedger) {
  std::mt19937_64 rng(8);
  FunctionOracle oracle(random_interacting(8, rng));
  TempDir whole;
  const std::string reference = kill_and_resume(oracle, 1000, whole.path());
  for (long budget : {0L, 1L, 7L, 8L, 9L, 20L, 25L}) {
    TempDir dir;
    EXPECT_EQ(kill_and_resume(oracle, budget, dir.path()), reference) << budget;
  }
}

TEST(Resume, CompleteLedgerIsNoOp) {
  FunctionOracle oracle(additive({0.5, 0.1, 0.9, 0.3, 0.2}));
  const TaskSpec task = mock_task();
  TempDir dir;
  RunOptions opts;
  opts.n = 3;
  opts.ledger_path = dir / "ledger.json";
  ResultCache cache;
  Scheduler s(oracle, task, cache, 1);
  const PruneLedger first = run_search(LayerTopology(5), s, opts);
  const std::string bytes = slurp(dir / "ledger.json");
  EXPECT_FALSE(resume(dir / "ledger.json").next_step.has_value());

  FunctionOracle untouched(additive({0.5, 0.1, 0.9, 0.3, 0.2}));
  ResultCache empty;
  Scheduler fresh(untouched, task, empty, 1);
  EXPECT_EQ(run_search(LayerTopology(5), fresh, opts), first);
  EXPECT_EQ(untouched.calls(), 0);
  EXPECT_EQ(slurp(dir / "ledger.json"), bytes);
}

TEST(Resume, GreedyLedgerExtendsToLargerTarget) {
  std::mt19937_64 rng(13);
  FunctionOracle oracle(random_interacting(7, rng));
  const TaskSpec task = mock_task();
  TempDir dir;
  RunOptions opts;
  opts.n = 2;
  opts.ledger_path = dir / "ledger.json";
  ResultCache cache;
  Scheduler s(oracle, task, cache, 2);
  run_search(LayerTopology(7), s, opts);
  opts.n = 4;
  const PruneLedger extended = run_search(LayerTopology(7), s, opts);
  EXPECT_EQ(serialize_ledger(extended),
            serialize_ledger(glp_search(LayerTopology(7), task, 4, oracle, 0)));
  // Asking for fewer layers reuses the longer ledger as is.
  opts.n = 1;
  EXPECT_EQ(run_search(LayerTopology(7), s, opts), extended);
  EXPECT_EQ(lookup(extended, 1).pruned.size(), 1u);
}

TEST(Resume, ForeignLedgerRefused) {
  FunctionOracle oracle(additive({1, 2, 3, 4}));
  TempDir dir;
  RunOptions opts;
  opts.n = 1;
  opts.ledger_path = dir / "ledger.json";
  ResultCache cache;
  const TaskSpec a = mock_task("a");
  const TaskSpec b = mock_task("b");
  Scheduler sa(oracle, a, cache, 1);
  Scheduler sb(oracle, b, cache, 1);
  run_search(LayerTopology(4), sa, opts);
  EXPECT_THROW(run_search(LayerTopology(4), sb, opts), InvalidRequest);
  opts.seed = 1;
  EXPECT_THROW(run_search(LayerTopology(4), sa, opts), InvalidRequest);
}

TEST(Runner, TopAndOptimalThroughScheduler) {
  FunctionOracle oracle(additive({0.5, -0.4, 0.9, 0.3, 0.2}));
  const TaskSpec task = mock_task();
  ResultCache cache;
  Scheduler s(oracle, task, cache, 2);
  RunOptions opts;
  opts.algorithm = Algorithm::kTop;
  opts.n = 2;
  EXPECT_EQ(run_search(LayerTopology(5), s, opts).chain(), (std::vector<LayerId>{4, 3}));
  EXPECT_EQ(s.oracle_calls(), 0u);
  opts.algorithm = Algorithm::kOptimal;
  const PruneLedger opt = run_search(LayerTopology(5), s, opts);
  EXPECT_EQ(opt.chain(), (std::vector<LayerId>{4, 1}));
  EXPECT_EQ(s.oracle_calls(), 10u);
}

TEST(Report, MediansAndRelativePerformance) {
  SeededOracle oracle({0.2, -0.3, 0.4, 0.1});
  const TaskSpec task = mock_task();
  ResultCache cache;
  Scheduler s(oracle, task, cache, 2);
  RunOptions opts;
  opts.n = 2;
  std::vector<PruneLedger> ledgers;
  ledgers.push_back(run_search(LayerTopology(4), s, opts));
  opts.algorithm = Algorithm::kTop;
  ledgers.push_back(run_search(LayerTopology(4), s, opts));
  const std::vector<std::uint64_t> seeds = {1, 5, 2};
  const Report report = build_report(ledgers, seeds, s);

  // Baseline keeps everything: 0.4 plus the median seed offset 0.02.
  EXPECT_NEAR(report.baseline.median, 0.42, 1e-12);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].label, "glp");
  EXPECT_EQ(report.rows[0].chain, (std::vector<LayerId>{1, 3}));
  EXPECT_NEAR(report.rows[0].median, 0.62, 1e-12);
  EXPECT_NEAR(report.rows[0].relative, 100.0 * 0.62 / 0.42, 1e-9);
  EXPECT_EQ(report.rows[1].chain, (std::vector<LayerId>{3, 2}));
  EXPECT_NEAR(report.rows[1].median, -0.08, 1e-12);
  EXPECT_EQ(report.rows[1].scores.size(), 3u);

  const std::string table = format_report(report);
  EXPECT_NE(table.find("baseline"), std::string::npos);
  EXPECT_NE(table.find("147.6"), std::string::npos);
  const std::string tsv = format_report_tsv(report);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 4);
  EXPECT_NE(format_chains(ledgers).find("glp"), std::string::npos);
  EXPECT_NE(format_step_table(ledgers[0]).find("*"), std::string::npos);
  EXPECT_THROW(build_report(ledgers, {}, s), InvalidRequest);
}

}  // namespace
}  // namespace glp
