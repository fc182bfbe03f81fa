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

#ifndef GLP_ORCHESTRATOR_RESULT_CACHE_HPP_
#define GLP_ORCHESTRATOR_RESULT_CACHE_HPP_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "glp/orchestrator/eval.hpp"

namespace glp {

// Evaluation results keyed by EvalRequest::key(), optionally backed by an
// append-only journal. Each journal line is
//
//   <crc32 of json, 8 lowercase hex> <space> <json record> \n
//
// Not thread-safe; the scheduler is its only writer.
class ResultCache {
 public:
  // Memory only.
  ResultCache() = default;
  // Replays `journal` (created if missing). A torn final line, the trace of
  // a crash mid-append, is dropped and truncated away; any other malformed
  // line raises FormatError carrying its byte offset.
  explicit ResultCache(const std::filesystem::path& journal);

  ResultCache(const ResultCache&) = delete;
  ResultCache& operator=(const ResultCache&) = delete;

  std::optional<EvalResult> find(const std::string& key) const;
  // Stores and journals `result` unless an ok result already holds its key.
  // A failed entry is replaced by a later ok one. Returns whether stored.
  bool record(const EvalResult& result);

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, EvalResult>& entries() const { return entries_; }
  // Lines dropped as torn during replay (0 or 1).
  int torn_lines() const { return torn_lines_; }

  // One journal line for `result`, newline included.
  static std::string encode_line(const EvalResult& result);
  // Inverse of encode_line() without the newline; `offset` locates errors.
  static EvalResult decode_line(const std::string& line, std::size_t offset);

 private:
  std::map<std::string, EvalResult> entries_;
  std::optional<std::ofstream> journal_;
  int torn_lines_ = 0;
};

}  // namespace glp

#endif  // GLP_ORCHESTRATOR_RESULT_CACHE_HPP_
