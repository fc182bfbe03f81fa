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

#include "glp/orchestrator/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "glp/error.hpp"

namespace glp {
namespace {

struct Job {
  std::size_t slot;  // index into the unique-key list
  const EvalRequest* request;
};

struct Done {
  std::size_t slot;
  Evaluation evaluation;
  double seconds = 0.0;
  std::exception_ptr error;
};

}  // namespace

Scheduler::Scheduler(const ScoreOracle& oracle, const TaskSpec& task,
                     ResultCache& cache, int parallelism)
    : oracle_(oracle),
      task_(task),
      cache_(cache),
      parallelism_(parallelism),
      task_id_(task_identity(task)),
      fingerprint_(oracle.fingerprint()),
      hyperparameter_hash_(oracle.hyperparameter_hash()) {
  if (parallelism < 1) throw InvalidRequest("parallelism must be >= 1");
}

EvalRequest Scheduler::request(std::span<const LayerId> kept,
                               std::uint64_t seed) const {
  EvalRequest r;
  r.task_id = task_id_;
  r.kept.assign(kept.begin(), kept.end());
  std::sort(r.kept.begin(), r.kept.end());
  r.seed = seed;
  r.oracle_fingerprint = fingerprint_;
  r.hyperparameter_hash = hyperparameter_hash_;
  return r;
}

std::vector<EvalResult> Scheduler::run_step(std::span<const EvalRequest> requests) {
  // Deduplicate and consult the cache.
  std::map<std::string, std::size_t> slot_of;
  std::vector<std::string> keys;
  std::vector<Job> jobs;
  for (const EvalRequest& r : requests) {
    if (r.task_id != task_id_ || r.oracle_fingerprint != fingerprint_) {
      throw InvalidRequest("request for another task or oracle: " + r.key());
    }
    std::string key = r.key();
    if (slot_of.contains(key)) continue;
    slot_of.emplace(key, keys.size());
    if (!cache_.find(key)) jobs.push_back({keys.size(), &r});
    keys.push_back(std::move(key));
  }

  std::mutex mu;
  std::condition_variable ready;
  std::deque<Done> finished;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      Done d;
      d.slot = jobs[i].slot;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ++calls_;
        d.evaluation = oracle_.evaluate(jobs[i].request->kept, task_, jobs[i].request->seed);
      } catch (...) {
        d.error = std::current_exception();
      }
      d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      {
        std::lock_guard lock(mu);
        finished.push_back(std::move(d));
      }
      ready.notify_one();
    }
  };

  const std::size_t threads =
      std::min(jobs.size(), static_cast<std::size_t>(parallelism_));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);

  // Single writer: journal every result as it lands.
  std::exception_ptr first_error;
  for (std::size_t received = 0; received < jobs.size(); ++received) {
    Done d;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return !finished.empty(); });
      d = std::move(finished.front());
      finished.pop_front();
    }
    if (d.error) {
      if (!first_error) first_error = d.error;
      continue;
    }
    try {
      cache_.record(EvalResult::from(d.evaluation, task_, keys[d.slot], d.seconds));
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<EvalResult> out;
  out.reserve(requests.size());
  for (const EvalRequest& r : requests) {
    out.push_back(*cache_.find(keys[slot_of.at(r.key())]));
  }
  return out;
}

BatchScorer Scheduler::scorer(std::uint64_t seed) {
  return [this, seed](std::span<const KeptLayers> batch) {
    std::vector<EvalRequest> requests;
    requests.reserve(batch.size());
    for (const KeptLayers& kept : batch) requests.push_back(request(kept, seed));
    const std::vector<EvalResult> results = run_step(requests);
    std::vector<double> scores;
    scores.reserve(results.size());
    for (const EvalResult& r : results) scores.push_back(r.selection_score(task_));
    return scores;
  };
}

}  // namespace glp
