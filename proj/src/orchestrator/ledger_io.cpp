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

#include "glp/orchestrator/ledger_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "glp/error.hpp"
#include "glp/json_number.hpp"

namespace glp {
namespace {

using Json = nlohmann::ordered_json;

std::size_t offset_of(const std::string& text, const std::string& needle) {
  const std::size_t at = text.find(needle);
  return at == std::string::npos ? 0 : at;
}

}  // namespace

std::string serialize_ledger(const PruneLedger& ledger) {
  Json j;
  j["schema_version"] = ledger.schema_version;
  j["algorithm"] = algorithm_name(ledger.algorithm);
  j["task_id"] = ledger.task_id;
  j["metric"] = metric_name(ledger.metric);
  j["depth"] = ledger.depth;
  j["target"] = ledger.target;
  j["seed"] = ledger.seed;
  j["oracle_fingerprint"] = ledger.oracle_fingerprint;
  j["chain"] = ledger.chain();
  Json steps = Json::array();
  for (const StepRecord& s : ledger.steps) {
    Json step;
    step["step"] = s.step_index;
    step["chosen"] = s.chosen;
    step["seed"] = s.seed_used;
    Json candidates = Json::array();
    for (const auto& [layer, score] : s.candidates) {
      candidates.push_back(Json{{"layer", layer}, {"score", encode_double(score)}});
    }
    step["candidates"] = std::move(candidates);
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  Json subsets = Json::array();
  for (const SubsetScore& s : ledger.subsets) {
    subsets.push_back(Json{{"pruned", s.pruned}, {"score", encode_double(s.score)}});
  }
  j["subsets"] = std::move(subsets);
  return j.dump(2) + "\n";
}

PruneLedger parse_ledger(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("ledger is not valid JSON: ") + e.what(), e.byte);
  }
  PruneLedger ledger;
  try {
    ledger.schema_version = j.at("schema_version").get<int>();
  } catch (const std::exception& e) {
    throw FormatError(std::string("ledger lacks a schema version: ") + e.what(), 0);
  }
  if (ledger.schema_version != PruneLedger::kSchemaVersion) {
    throw FormatError("unsupported ledger schema version " +
                          std::to_string(ledger.schema_version) +
                          " (this build reads version " +
                          std::to_string(PruneLedger::kSchemaVersion) + ")",
                      offset_of(text, "\"schema_version\""));
  }
  try {
    ledger.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    ledger.task_id = j.at("task_id").get<std::string>();
    ledger.metric = parse_metric(j.at("metric").get<std::string>());
    ledger.depth = j.at("depth").get<int>();
    ledger.target = j.at("target").get<int>();
    ledger.seed = j.at("seed").get<std::uint64_t>();
    ledger.oracle_fingerprint = j.at("oracle_fingerprint").get<std::string>();
    for (const Json& step : j.at("steps")) {
      StepRecord s;
      s.step_index = step.at("step").get<int>();
      s.chosen = step.at("chosen").get<LayerId>();
      s.seed_used = step.at("seed").get<std::uint64_t>();
      for (const Json& c : step.at("candidates")) {
        s.candidates.emplace(c.at("layer").get<LayerId>(), decode_double(c.at("score")));
      }
      ledger.steps.push_back(std::move(s));
    }
    for (const Json& s : j.at("subsets")) {
      ledger.subsets.push_back(
          {s.at("pruned").get<std::vector<LayerId>>(), decode_double(s.at("score"))});
    }
    validate(ledger);
    if (j.at("chain").get<std::vector<LayerId>>() != ledger.chain()) {
      throw InvalidRequest("chain disagrees with the chosen layers of its steps");
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed ledger: ") + e.what(), 0);
  }
  return ledger;
}

void write_ledger(const std::filesystem::path& path, const PruneLedger& ledger) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write ledger " + tmp.string());
    out << serialize_ledger(ledger);
    out.flush();
    if (!out) throw Error("failed writing ledger " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

PruneLedger read_ledger(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ledger " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ledger(buf.str());
}

}  // namespace glp
