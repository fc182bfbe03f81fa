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

#ifndef GLP_TESTS_SUPPORT_MOCK_ORACLES_HPP_
#define GLP_TESTS_SUPPORT_MOCK_ORACLES_HPP_

#include <atomic>
#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "glp/core/oracle.hpp"
#include "glp/error.hpp"

namespace glp::testing_support {

using ScoreFn = std::function<double(std::span<const LayerId> kept)>;

// Oracle around a plain function of the kept set; counts its calls.
class FunctionOracle : public ScoreOracle {
 public:
  explicit FunctionOracle(ScoreFn fn, std::string tag = "fn")
      : fn_(std::move(fn)), tag_(std::move(tag)) {}

  Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec&,
                      std::uint64_t) const override {
    ++calls_;
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    Evaluation e;
    e.metric = fn_(kept);
    e.validation_loss = -e.metric;
    return e;
  }
  std::string kind() const override { return "mock"; }
  std::string hyperparameters() const override { return tag_; }

  long calls() const { return calls_.load(); }
  void reset_calls() { calls_ = 0; }
  void set_delay(std::chrono::milliseconds d) { delay_ = d; }

 private:
  ScoreFn fn_;
  std::string tag_;
  std::chrono::milliseconds delay_{0};
  mutable std::atomic<long> calls_{0};
};

// score(kept) = sum of w[i] over kept i.
inline ScoreFn additive(std::vector<double> w) {
  return [w = std::move(w)](std::span<const LayerId> kept) {
    double s = 0;
    for (LayerId id : kept) s += w[static_cast<std::size_t>(id)];
    return s;
  };
}

inline std::vector<double> random_weights(int depth, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  std::vector<double> w(static_cast<std::size_t>(depth));
  for (double& x : w) x = n(rng);
  return w;
}

// Accuracy-like score with pairwise interactions between pruned layers:
// base - sum_{i pruned} cost_i - sum_{i<j pruned} coupling_ij.
inline ScoreFn random_interacting(int depth, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cost(0.0, 0.08);
  std::normal_distribution<double> coupling(0.0, 0.02);
  const std::size_t d = static_cast<std::size_t>(depth);
  std::vector<double> c(d);
  std::vector<std::vector<double>> b(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    c[i] = cost(rng);
    for (std::size_t j = i + 1; j < d; ++j) b[i][j] = coupling(rng);
  }
  return [c, b, d](std::span<const LayerId> kept) {
    std::vector<bool> pruned(d, true);
    for (LayerId id : kept) pruned[static_cast<std::size_t>(id)] = false;
    double s = 0.9;
    for (std::size_t i = 0; i < d; ++i) {
      if (!pruned[i]) continue;
      s -= c[i];
      for (std::size_t j = i + 1; j < d; ++j) {
        if (pruned[j]) s -= b[i][j];
      }
    }
    return s;
  };
}

// Throws OracleError once `budget` evaluations have been served; models a
// process killed mid-search.
class CrashingOracle : public ScoreOracle {
 public:
  CrashingOracle(const ScoreOracle& inner, long budget)
      : inner_(inner), budget_(budget) {}

  Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec& task,
                      std::uint64_t seed) const override {
    if (served_.fetch_add(1) >= budget_) throw OracleError("simulated crash");
    return inner_.evaluate(kept, task, seed);
  }
  std::string kind() const override { return inner_.kind(); }
  std::string hyperparameters() const override {
    return inner_.hyperparameters();
  }

 private:
  const ScoreOracle& inner_;
  long budget_;
  mutable std::atomic<long> served_{0};
};

inline TaskSpec mock_task(std::string name = "mock") {
  TaskSpec t;
  t.name = std::move(name);
  t.metric = MetricKind::kAccuracy;
  return t;
}

}  // namespace glp::testing_support

#endif  // GLP_TESTS_SUPPORT_MOCK_ORACLES_HPP_
