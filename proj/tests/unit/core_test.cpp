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
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "glp/core/ledger.hpp"
#include "glp/core/search.hpp"
#include "glp/error.hpp"
#include "mock_oracles.hpp"

namespace glp {
namespace {

using testing_support::additive;
using testing_support::FunctionOracle;
using testing_support::mock_task;

TEST(Topology, RejectsShallowModels) {
  EXPECT_THROW(LayerTopology(1), InvalidRequest);
  EXPECT_EQ(LayerTopology(3).layer_ids(), (std::vector<LayerId>{0, 1, 2}));
}

TEST(Topology, KeptAfterValidates) {
  const LayerTopology t(4);
  const std::vector<LayerId> p = {3, 1};
  EXPECT_EQ(t.kept_after(p), (KeptLayers{0, 2}));
  const std::vector<LayerId> dup = {1, 1};
  const std::vector<LayerId> foreign = {4};
  const std::vector<LayerId> all = {0, 1, 2, 3};
  EXPECT_THROW(t.kept_after(dup), InvalidRequest);
  EXPECT_THROW(t.kept_after(foreign), InvalidRequest);
  EXPECT_THROW(t.kept_after(all), InvalidRequest);
}

TEST(TopLayer, PrunesHighestFirst) {
  EXPECT_EQ(top_layer_prune(LayerTopology(12), 6).pruned,
            (std::vector<LayerId>{11, 10, 9, 8, 7, 6}));
  EXPECT_TRUE(top_layer_prune(LayerTopology(12), 0).pruned.empty());
  EXPECT_EQ(top_layer_prune(LayerTopology(4), 2).pruned,
            (std::vector<LayerId>{3, 2}));
  EXPECT_THROW(top_layer_prune(LayerTopology(4), 4), InvalidRequest);
}

TEST(Enumerate, CountsMatchBinomial) {
  EXPECT_EQ(enumerate_subsets(LayerTopology(12), 2).size(), 66u);
  EXPECT_EQ(enumerate_subsets(LayerTopology(12), 6).size(), 924u);
  EXPECT_EQ(binomial(12, 6), 924u);
  for (int d = 2; d <= 9; ++d) {
    for (int n = 0; n < d; ++n) {
      const auto all = enumerate_subsets(LayerTopology(d), n);
      EXPECT_EQ(all.size(), binomial(d, n));
      EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
      EXPECT_EQ(std::set<std::vector<LayerId>>(all.begin(), all.end()).size(),
                all.size());
    }
  }
}

TEST(Enumerate, SmallCaseAndRejection) {
  EXPECT_EQ(enumerate_subsets(LayerTopology(3), 2),
            (std::vector<std::vector<LayerId>>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_THROW(enumerate_subsets(LayerTopology(3), 3), InvalidRequest);
  EXPECT_EQ(enumerate_subsets(LayerTopology(3), 0),
            (std::vector<std::vector<LayerId>>{{}}));
}

TEST(Optimal, PicksHarmfulLayer) {
  FunctionOracle oracle(additive({1, 1, 1, -5}));
  const auto r = optimal_search(LayerTopology(4), mock_task(), 1, oracle, 0);
  EXPECT_EQ(r.solution.pruned, (std::vector<LayerId>{3}));
  EXPECT_EQ(r.table.size(), 4u);
}

TEST(Optimal, ZeroPrunesEvaluatesBaselineOnce) {
  FunctionOracle oracle(additive({1, 1, 1, 1}));
  const auto r = optimal_search(LayerTopology(4), mock_task(), 0, oracle, 0);
  EXPECT_TRUE(r.solution.pruned.empty());
  EXPECT_EQ(oracle.calls(), 1);
}

TEST(Optimal, CallCountIsBinomial) {
  FunctionOracle oracle(additive(std::vector<double>(12, 1.0)));
  optimal_search(LayerTopology(12), mock_task(), 2, oracle, 0);
  EXPECT_EQ(oracle.calls(), 66);
}

TEST(Optimal, FlatLandscapeFallsBackToTop) {
  FunctionOracle oracle([](std::span<const LayerId>) { return 0.5; });
  const auto r = optimal_search(LayerTopology(6), mock_task(), 3, oracle, 0);
  EXPECT_EQ(r.solution.pruned, (std::vector<LayerId>{5, 4, 3}));
}

TEST(Optimal, OracleFailureNamesSubset) {
  FunctionOracle oracle([](std::span<const LayerId> kept) -> double {
    if (kept.size() == 3 && kept[0] == 0 && kept[1] == 1 && kept[2] == 3) {
      throw OracleError("worker exited");
    }
    return 1.0;
  });
  try {
    optimal_search(LayerTopology(4), mock_task(), 1, oracle, 0);
    FAIL() << "expected OracleError";
  } catch (const OracleError& e) {
    EXPECT_NE(std::string(e.what()).find("[2]"), std::string::npos) << e.what();
  }
}

TEST(Greedy, CallCountForTwelveTwo) {
  FunctionOracle oracle(additive(std::vector<double>(12, 1.0)));
  const PruneLedger l = glp_search(LayerTopology(12), mock_task(), 2, oracle, 0);
  EXPECT_EQ(oracle.calls(), 23);
  EXPECT_EQ(l.steps.size(), 2u);
  EXPECT_EQ(l.steps[0].candidates.size(), 12u);
  EXPECT_EQ(l.steps[1].candidates.size(), 11u);
}

TEST(Greedy, AdditiveExample) {
  FunctionOracle oracle(additive({1, -3, 1, -2}));
  const PruneLedger l = glp_search(LayerTopology(4), mock_task(), 2, oracle, 9);
  EXPECT_EQ(l.chain(), (std::vector<LayerId>{1, 3}));
  EXPECT_EQ(l.steps[0].seed_used, 9u);
  EXPECT_EQ(l.steps[0].step_index, 1);
  EXPECT_EQ(l.steps[1].step_index, 2);
}

TEST(Greedy, TieBreakPrefersHighestLayer) {
  FunctionOracle oracle([](std::span<const LayerId>) { return 0.0; });
  const PruneLedger l = glp_search(LayerTopology(8), mock_task(), 4, oracle, 0);
  EXPECT_EQ(l.chain(), (std::vector<LayerId>{7, 6, 5, 4}));
}

TEST(Greedy, ZeroStepsMakeNoCalls) {
  FunctionOracle oracle(additive({1, 2, 3}));
  const PruneLedger l = glp_search(LayerTopology(3), mock_task(), 0, oracle, 0);
  EXPECT_TRUE(l.steps.empty());
  EXPECT_TRUE(l.complete());
  EXPECT_EQ(oracle.calls(), 0);
}

TEST(Greedy, FailedCandidatesLoseButDoNotAbort) {
  // Pruning layer 2 "diverges".
  class Flaky : public ScoreOracle {
   public:
    Evaluation evaluate(std::span<const LayerId> kept, const TaskSpec&,
                        std::uint64_t) const override {
      if (std::find(kept.begin(), kept.end(), 2) == kept.end()) {
        return Evaluation::failed("diverged");
      }
      Evaluation e;
      e.metric = 0.5;
      return e;
    }
    std::string kind() const override { return "flaky"; }
    std::string hyperparameters() const override { return ""; }
  } oracle;
  const PruneLedger l = glp_search(LayerTopology(4), mock_task(), 1, oracle, 0);
  EXPECT_EQ(l.chain(), (std::vector<LayerId>{3}));
  EXPECT_EQ(l.steps[0].candidates.at(2), kFailedScore);
}

TEST(Greedy, OracleErrorAbortsAfterPersistingSteps) {
  FunctionOracle inner(additive({1, -3, 1, -2, 0.5}));
  testing_support::CrashingOracle oracle(inner, 5 + 4 + 1);
  const TaskSpec task = mock_task();
  PruneLedger ledger = new_ledger(LayerTopology(5), task, oracle.fingerprint(),
                                  Algorithm::kGreedy, 3, 0);
  PruneLedger persisted;
  EXPECT_THROW(continue_greedy(ledger, sequential_scorer(oracle, task, 0),
                               [&](const PruneLedger& l) { persisted = l; }),
               OracleError);
  EXPECT_EQ(persisted.steps.size(), 2u);
  // Resume with a healthy oracle.
  continue_greedy(persisted, sequential_scorer(inner, task, 0));
  EXPECT_EQ(persisted, glp_search(LayerTopology(5), task, 3, inner, 0));
}

TEST(Lookup, PrefixesOfStoredChain) {
  PruneLedger l;
  l.depth = 12;
  l.target = 6;
  for (LayerId id : {11, 10, 9, 4, 0, 5}) {
    l.steps.push_back({static_cast<int>(l.steps.size()) + 1, {{id, 0.0}}, id, 0});
  }
  EXPECT_EQ(lookup(l, 3).pruned, (std::vector<LayerId>{11, 10, 9}));
  EXPECT_TRUE(lookup(l, 0).pruned.empty());
  EXPECT_EQ(lookup(l, 6).pruned, l.chain());
  EXPECT_THROW(lookup(l, 7), InvalidRequest);
  try {
    lookup(l, 7);
  } catch (const InvalidRequest& e) {
    EXPECT_NE(std::string(e.what()).find("extend the search"), std::string::npos);
  }
}

TEST(Lookup, OptimalLedgerOnlyAtItsSize) {
  FunctionOracle oracle(additive({1, -1, 1, -2, 3}));
  const LayerTopology topo(5);
  const TaskSpec task = mock_task();
  const auto r = optimal_search(topo, task, 2, oracle, 0);
  const PruneLedger l = optimal_ledger(topo, task, oracle.fingerprint(), 2, 0, r);
  EXPECT_EQ(lookup(l, 2).pruned, (std::vector<LayerId>{3, 1}));
  EXPECT_THROW(lookup(l, 1), InvalidRequest);
}

TEST(LedgerValidation, CatchesBrokenChains) {
  FunctionOracle oracle(additive({1, -1, 1, -2}));
  PruneLedger l = glp_search(LayerTopology(4), mock_task(), 2, oracle, 0);
  EXPECT_NO_THROW(validate(l));
  PruneLedger dup = l;
  dup.steps[1].chosen = dup.steps[0].chosen;
  EXPECT_THROW(validate(dup), InvalidRequest);
  PruneLedger idx = l;
  idx.steps[1].step_index = 5;
  EXPECT_THROW(validate(idx), InvalidRequest);
}

// Property sweeps over random oracles.

TEST(GreedyProperties, CallCountLaw) {
  std::mt19937_64 rng(1);
  for (int d = 2; d <= 10; ++d) {
    for (int n = 0; n < d; ++n) {
      FunctionOracle oracle(additive(testing_support::random_weights(d, rng)));
      glp_search(LayerTopology(d), mock_task(), n, oracle, 0);
      long expected = 0;
      for (int k = 1; k <= n; ++k) expected += d - k + 1;
      EXPECT_EQ(oracle.calls(), expected) << "d=" << d << " n=" << n;

      FunctionOracle opt(additive(testing_support::random_weights(d, rng)));
      optimal_search(LayerTopology(d), mock_task(), n, opt, 0);
      EXPECT_EQ(static_cast<std::uint64_t>(opt.calls()), binomial(d, n));
    }
  }
}

TEST(GreedyProperties, PrefixCoherence) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 3 + trial % 6;
    FunctionOracle oracle(testing_support::random_interacting(d, rng));
    const PruneLedger full =
        glp_search(LayerTopology(d), mock_task(), d - 1, oracle, 3);
    for (int x = 0; x < d; ++x) {
      EXPECT_EQ(lookup(full, static_cast<std::size_t>(x)).pruned,
                glp_search(LayerTopology(d), mock_task(), x, oracle, 3).chain());
    }
  }
}

TEST(GreedyProperties, AgreesWithOptimalOnAdditiveOracles) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 7;
    FunctionOracle oracle(additive(testing_support::random_weights(d, rng)));
    const LayerTopology topo(d);
    const PruneLedger g = glp_search(topo, mock_task(), d - 1, oracle, 0);
    for (int n = 0; n < d; ++n) {
      std::vector<LayerId> greedy_set = lookup(g, static_cast<std::size_t>(n)).pruned;
      std::sort(greedy_set.begin(), greedy_set.end(), std::greater<>());
      EXPECT_EQ(greedy_set,
                optimal_search(topo, mock_task(), n, oracle, 0).solution.pruned);
    }
  }
}

TEST(GreedyProperties, ChosenScoreDominatesTopCandidate) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 4 + trial % 5;
    FunctionOracle oracle(testing_support::random_interacting(d, rng));
    const PruneLedger l = glp_search(LayerTopology(d), mock_task(), d - 1, oracle, 0);
    for (const StepRecord& s : l.steps) {
      const double top_choice = s.candidates.rbegin()->second;
      EXPECT_GE(s.candidates.at(s.chosen), top_choice);
      EXPECT_EQ(s.candidates.size(),
                static_cast<std::size_t>(d - (s.step_index - 1)));
    }
  }
}

TEST(GreedyProperties, Deterministic) {
  std::mt19937_64 rng(5);
  FunctionOracle oracle(testing_support::random_interacting(8, rng));
  EXPECT_EQ(glp_search(LayerTopology(8), mock_task(), 5, oracle, 1),
            glp_search(LayerTopology(8), mock_task(), 5, oracle, 1));
}

}  // namespace
}  // namespace glp
