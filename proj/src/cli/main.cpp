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

// glp: search, look up, benchmark and report layer-pruning runs.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glp/bridge/remote_oracle.hpp"
#include "glp/core/hashed_oracle.hpp"
#include "glp/core/search.hpp"
#include "glp/error.hpp"
#include "glp/orchestrator/ledger_io.hpp"
#include "glp/orchestrator/report.hpp"
#include "glp/orchestrator/result_cache.hpp"
#include "glp/orchestrator/runner.hpp"
#include "glp/orchestrator/scheduler.hpp"
#include "glp/toy/bench.hpp"
#include "glp/toy/checkpoint.hpp"
#include "glp/toy/oracle.hpp"
#include "glp/toy/pretrain.hpp"
#include "glp/toy/tasks.hpp"

namespace {

namespace fs = std::filesystem;
using namespace glp;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Where the scores come from, shared by `search` and `report`.
struct OracleFlags {
  std::string kind = "builtin";
  std::string task;
  // builtin
  std::string checkpoint = GLP_DEFAULT_CHECKPOINT;
  std::uint64_t data_seed = 1;
  // mock and bridge
  int depth = 12;
  std::uint64_t mock_seed = 0;
  // bridge
  std::string worker;
  std::string locator;
  std::string metric = "accuracy";
  int timeout_ms = 30 * 60 * 1000;
  bridge::WireHyperparameters hyperparameters;
  // all
  bool loss_ablation = false;
  int parallelism = 1;
  std::string cache_dir;
  bool no_cache = false;
};

void add_oracle_flags(CLI::App& cmd, OracleFlags& f) {
  cmd.add_option("--oracle", f.kind, "Score source")
      ->check(CLI::IsMember({"builtin", "bridge", "mock"}))
      ->capture_default_str();
  cmd.add_option("--task", f.task,
                 "Task name; builtin tasks: unigram, order, regression, marker");
  cmd.add_option("--checkpoint", f.checkpoint, "builtin: pretrained toy checkpoint")
      ->capture_default_str();
  cmd.add_option("--data-seed", f.data_seed, "builtin: seed of the synthetic task data")
      ->capture_default_str();
  cmd.add_option("--depth", f.depth, "mock, bridge: number of encoder layers")
      ->capture_default_str();
  cmd.add_option("--mock-seed", f.mock_seed, "mock: seed of the hashed score function")
      ->capture_default_str();
  cmd.add_option("--worker", f.worker, "bridge: worker command line");
  cmd.add_option("--locator", f.locator, "bridge: dataset locator passed to the worker");
  cmd.add_option("--metric", f.metric, "bridge: task metric")->capture_default_str();
  cmd.add_option("--timeout-ms", f.timeout_ms, "bridge: per-request timeout")
      ->capture_default_str();
  cmd.add_option("--lr", f.hyperparameters.learning_rate, "bridge: learning rate")
      ->capture_default_str();
  cmd.add_option("--batch-size", f.hyperparameters.batch_size, "bridge: batch size")
      ->capture_default_str();
  cmd.add_option("--epochs", f.hyperparameters.epochs, "bridge: epochs")
      ->capture_default_str();
  cmd.add_option("--max-seq-len", f.hyperparameters.max_seq_len,
                 "bridge: maximum sequence length")
      ->capture_default_str();
  cmd.add_flag("--loss-ablation", f.loss_ablation,
               "Select candidates by validation loss instead of the task metric");
  cmd.add_option("--parallelism", f.parallelism, "Concurrent evaluations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--cache-dir", f.cache_dir,
                 "Result journal directory (default: $GLP_CACHE_DIR or .glp-cache)");
  cmd.add_flag("--no-cache", f.no_cache, "Keep results in memory only");
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Everything a command needs to evaluate pruned models.
struct Context {
  std::unique_ptr<ScoreOracle> oracle;
  TaskSpec task;
  int depth = 0;
  std::unique_ptr<ResultCache> cache;
  std::unique_ptr<Scheduler> scheduler;
};

fs::path cache_dir(const OracleFlags& f) {
  if (!f.cache_dir.empty()) return f.cache_dir;
  if (const char* env = std::getenv("GLP_CACHE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return ".glp-cache";
}

std::unique_ptr<Context> make_context(const OracleFlags& f) {
  auto ctx = std::make_unique<Context>();
  if (f.kind == "builtin") {
    toy::ToyTransformer model = toy::load_checkpoint(f.checkpoint);
    ctx->depth = model.config().depth;
    const std::vector<TaskSpec> tasks = toy::make_synthetic_tasks(f.data_seed);
    ctx->task = toy::find_task(tasks, f.task.empty() ? "unigram" : f.task);
    ctx->oracle = std::make_unique<toy::ToyOracle>(std::move(model),
                                                   toy::TrainSpec::toy_defaults());
  } else if (f.kind == "mock") {
    ctx->depth = f.depth;
    ctx->task.name = f.task.empty() ? "mock" : f.task;
    ctx->task.metric = MetricKind::kAccuracy;
    ctx->oracle = std::make_unique<HashedOracle>(f.mock_seed);
  } else {
    if (f.worker.empty()) throw InvalidRequest("--oracle bridge needs --worker");
    if (f.task.empty()) throw InvalidRequest("--oracle bridge needs --task");
    ctx->depth = f.depth;
    ctx->task.name = f.task;
    ctx->task.locator = f.locator;
    ctx->task.metric = parse_metric(f.metric);
    ctx->task.num_labels = ctx->task.metric == MetricKind::kSpearmanCorr ? 0 : 2;
    bridge::BridgeOptions options;
    options.command.argv = split_words(f.worker);
    options.hyperparameters = f.hyperparameters;
    options.timeout = std::chrono::milliseconds(f.timeout_ms);
    options.workers = f.parallelism;
    ctx->oracle = std::make_unique<bridge::RemoteOracle>(std::move(options));
  }
  if (f.loss_ablation) ctx->task = with_loss_ablation(std::move(ctx->task));
  if (f.no_cache) {
    ctx->cache = std::make_unique<ResultCache>();
  } else {
    const fs::path dir = cache_dir(f);
    fs::create_directories(dir);
    ctx->cache = std::make_unique<ResultCache>(dir / "results.journal");
  }
  ctx->scheduler =
      std::make_unique<Scheduler>(*ctx->oracle, ctx->task, *ctx->cache, f.parallelism);
  return ctx;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// ---- search ---------------------------------------------------------------

struct SearchFlags {
  OracleFlags oracle;
  std::string algorithm = "glp";
  int n = 1;
  std::uint64_t seed = 0;
  std::string out;
};

std::size_t search_evaluations(const PruneLedger& l) {
  if (l.algorithm == Algorithm::kOptimal) return l.subsets.size();
  std::size_t total = 0;
  for (const StepRecord& s : l.steps) total += s.candidates.size();
  return total;
}

int run_search_command(const SearchFlags& f) {
  const std::unique_ptr<Context> ctx = make_context(f.oracle);
  const LayerTopology topology(ctx->depth);
  RunOptions options;
  options.algorithm = parse_algorithm(f.algorithm);
  options.n = f.n;
  options.seed = f.seed;
  if (!f.out.empty()) options.ledger_path = f.out;

  std::cout << "task " << ctx->task.name << " ("
            << metric_name(ctx->task.selection_metric()) << "), depth " << ctx->depth
            << ", oracle " << ctx->oracle->fingerprint() << "\n";
  const PruneLedger ledger = run_search(topology, *ctx->scheduler, options);
  std::size_t evaluations = search_evaluations(ledger);

  if (ledger.algorithm == Algorithm::kGreedy && !ledger.steps.empty()) {
    std::cout << format_step_table(ledger);
  }
  if (f.n == 0 && ledger.algorithm != Algorithm::kOptimal) {
    // Nothing to prune: report the unpruned model.
    const KeptLayers all = topology.layer_ids();
    const EvalRequest request = ctx->scheduler->request(all, f.seed);
    const EvalResult baseline = ctx->scheduler->run_step(std::span(&request, 1)).front();
    std::cout << "baseline " << metric_name(baseline.metric.kind) << " "
              << fixed(baseline.metric.value) << "\n";
    ++evaluations;
  }
  if (ledger.algorithm == Algorithm::kOptimal && !ledger.subsets.empty()) {
    double best = kFailedScore;
    for (const SubsetScore& s : ledger.subsets) best = std::max(best, s.score);
    std::cout << "best score " << fixed(best) << "\n";
  }
  const std::vector<LayerId> pruned = lookup(ledger, static_cast<std::size_t>(f.n)).pruned;
  std::cout << "pruned " << format_layers(pruned) << "\n";
  std::cout << "evaluations " << evaluations << " (oracle calls "
            << ctx->scheduler->oracle_calls() << ")\n";
  if (!f.out.empty()) std::cout << "ledger " << f.out << "\n";
  return 0;
}

// ---- lookup ---------------------------------------------------------------

int run_lookup_command(const std::string& path, std::size_t x) {
  const PruneLedger ledger = read_ledger(path);
  const PruneSolution solution = lookup(ledger, x);
  std::cout << format_layers(solution.pruned) << "\n";
  for (std::size_t k = 0; k < solution.pruned.size() && k < ledger.steps.size(); ++k) {
    const StepRecord& s = ledger.steps[k];
    const auto it = s.candidates.find(s.chosen);
    std::cout << "step " << s.step_index << " prune " << s.chosen;
    if (it != s.candidates.end()) std::cout << " score " << fixed(it->second);
    std::cout << "\n";
  }
  return 0;
}

// ---- bench ----------------------------------------------------------------

struct BenchFlags {
  std::vector<int> depths;
  int max_depth = 12;
  toy::BenchOptions options;
  std::string tsv;
};

int run_bench_command(const BenchFlags& f) {
  toy::ToyConfig config;
  config.depth = f.max_depth;
  std::vector<int> depths = f.depths;
  if (depths.empty()) {
    for (int d = 1; d <= f.max_depth; ++d) depths.push_back(d);
  }
  for (int d : depths) {
    if (d < 0 || d > f.max_depth) {
      throw InvalidRequest("depth " + std::to_string(d) + " outside [0, " +
                           std::to_string(f.max_depth) + "]");
    }
  }
  const std::vector<toy::BenchRow> rows = toy::bench_latency(config, depths, f.options);
  std::ostringstream tsv;
  tsv << "depth\tmedian_seconds\tspeedup\n";
  std::cout << std::left << std::setw(8) << "depth" << std::setw(16) << "median [ms]"
            << "speedup\n";
  for (const toy::BenchRow& r : rows) {
    std::cout << std::setw(8) << r.depth << std::setw(16) << fixed(r.median_seconds * 1e3, 4)
              << fixed(r.speedup, 2) << "x\n";
    tsv << r.depth << '\t' << std::setprecision(9) << r.median_seconds << '\t'
        << r.speedup << '\n';
  }
  if (!f.tsv.empty()) write_file(f.tsv, tsv.str());
  return 0;
}

// ---- report ---------------------------------------------------------------

struct ReportFlags {
  OracleFlags oracle;
  std::vector<std::string> ledgers;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string data_dir;
};

int run_report_command(ReportFlags f) {
  std::vector<PruneLedger> ledgers;
  for (const std::string& p : f.ledgers) ledgers.push_back(read_ledger(p));
  for (const PruneLedger& l : ledgers) {
    if (l.task_id != ledgers.front().task_id) {
      throw InvalidRequest("ledgers of different tasks ('" + ledgers.front().task_id +
                           "', '" + l.task_id + "') cannot share a report");
    }
  }
  if (f.oracle.task.empty()) f.oracle.task = ledgers.front().task_id;
  if (f.oracle.kind != "builtin") f.oracle.depth = ledgers.front().depth;
  const std::unique_ptr<Context> ctx = make_context(f.oracle);
  const Report report = build_report(ledgers, f.seeds, *ctx->scheduler);
  std::cout << format_report(report) << "\n" << format_chains(ledgers);
  for (const PruneLedger& l : ledgers) {
    if (l.algorithm == Algorithm::kGreedy) {
      std::cout << "\n" << algorithm_name(l.algorithm) << " candidate scores\n"
                << format_step_table(l);
    }
  }
  if (!f.data_dir.empty()) {
    const fs::path dir = f.data_dir;
    write_file(dir / "report.tsv", format_report_tsv(report));
    // Long format for per-step plots: one row per evaluated candidate.
    std::ostringstream steps;
    steps << "algorithm\tstep\tlayer\tscore\tchosen\n";
    std::ostringstream subsets;
    subsets << "algorithm\tpruned\tscore\n";
    for (const PruneLedger& l : ledgers) {
      for (const StepRecord& s : l.steps) {
        for (const auto& [layer, score] : s.candidates) {
          steps << algorithm_name(l.algorithm) << '\t' << s.step_index << '\t' << layer
                << '\t' << std::setprecision(17) << score << '\t'
                << (layer == s.chosen ? 1 : 0) << '\n';
        }
      }
      for (const SubsetScore& s : l.subsets) {
        subsets << algorithm_name(l.algorithm) << '\t' << format_layers(s.pruned) << '\t'
                << std::setprecision(17) << s.score << '\n';
      }
    }
    write_file(dir / "steps.tsv", steps.str());
    write_file(dir / "subsets.tsv", subsets.str());
    std::cout << "\nwrote " << (dir / "report.tsv").string() << ", "
              << (dir / "steps.tsv").string() << ", " << (dir / "subsets.tsv").string()
              << "\n";
  }
  return 0;
}

// ---- pretrain -------------------------------------------------------------

struct PretrainFlags {
  toy::PretrainSpec spec;
  std::string out = GLP_DEFAULT_CHECKPOINT;
  int log_every = 500;
};

int run_pretrain_command(const PretrainFlags& f) {
  const toy::PretrainResult result = toy::pretrain(f.spec, [&](int step, double loss) {
    if (f.log_every > 0 && (step + 1) % f.log_every == 0) {
      std::cout << "step " << step + 1 << " loss " << fixed(loss) << "\n" << std::flush;
    }
  });
  toy::save_checkpoint(f.out, result.model);
  std::cout << "wrote " << f.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy layer pruning for transformer encoders."};
  app.set_config("--config", "", "TOML/INI file of flags; sections name subcommands");
  app.require_subcommand(1);

  SearchFlags search;
  CLI::App* search_cmd = app.add_subcommand("search", "Run a pruning search and write its ledger");
  search_cmd->add_option("--algo", search.algorithm, "Search algorithm")
      ->check(CLI::IsMember({"glp", "top", "optimal"}))
      ->capture_default_str();
  search_cmd->add_option("--n", search.n, "Layers to prune")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  search_cmd->add_option("--seed", search.seed, "Fine-tuning seed")->capture_default_str();
  search_cmd->add_option("--out", search.out, "Ledger path; an existing ledger is resumed");
  add_oracle_flags(*search_cmd, search.oracle);

  std::string lookup_path;
  std::size_t lookup_x = 0;
  CLI::App* lookup_cmd =
      app.add_subcommand("lookup", "Read the best x-layer pruning from a ledger");
  lookup_cmd->add_option("ledger", lookup_path, "Ledger file")->required();
  lookup_cmd->add_option("x", lookup_x, "Layers to prune")->required();

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Forward latency of the toy model by depth");
  bench_cmd->add_option("--depths", bench.depths, "Depths to time (default 1..max)")
      ->delimiter(',');
  bench_cmd->add_option("--max-depth", bench.max_depth, "Depth of the unpruned model")
      ->capture_default_str();
  bench_cmd->add_option("--batch", bench.options.batch, "Batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--repeats", bench.options.repeats, "Timed samples per depth")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--tsv", bench.tsv, "Also write the table here");

  ReportFlags report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Multi-seed comparison of ledgers on one task");
  report_cmd->add_option("ledgers", report.ledgers, "Ledger files")->required();
  report_cmd->add_option("--seeds", report.seeds, "Fine-tuning seeds")
      ->delimiter(',')
      ->capture_default_str();
  report_cmd->add_option("--data-dir", report.data_dir,
                         "Write report.tsv, steps.tsv and subsets.tsv here");
  add_oracle_flags(*report_cmd, report.oracle);

  PretrainFlags pretrain;
  CLI::App* pretrain_cmd =
      app.add_subcommand("pretrain", "Pretrain the toy model on the synthetic language");
  pretrain_cmd->add_option("--out", pretrain.out, "Checkpoint to write")->capture_default_str();
  pretrain_cmd->add_option("--depth", pretrain.spec.config.depth, "Encoder layers")
      ->capture_default_str();
  pretrain_cmd->add_option("--steps", pretrain.spec.steps, "Optimizer steps")
      ->capture_default_str();
  pretrain_cmd->add_option("--seed", pretrain.spec.seed, "Initialization and data seed")
      ->capture_default_str();
  pretrain_cmd->add_option("--log-every", pretrain.log_every, "Print the loss this often")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*search_cmd) return run_search_command(search);
    if (*lookup_cmd) return run_lookup_command(lookup_path, lookup_x);
    if (*bench_cmd) return run_bench_command(bench);
    if (*report_cmd) return run_report_command(report);
    if (*pretrain_cmd) return run_pretrain_command(pretrain);
  } catch (const std::exception& e) {
    std::cerr << "glp: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
