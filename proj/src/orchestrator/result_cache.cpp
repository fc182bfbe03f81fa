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

#include "glp/orchestrator/result_cache.hpp"

#include <cstdio>
#include <sstream>

#include <zlib.h>

#include <json.hpp>

#include "glp/error.hpp"
#include "glp/json_number.hpp"

namespace glp {
namespace {

using Json = nlohmann::ordered_json;

std::string crc_hex(const std::string& data) {
  const uLong crc = crc32(crc32(0L, Z_NULL, 0),
                          reinterpret_cast<const Bytef*>(data.data()),
                          static_cast<uInt>(data.size()));
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

}  // namespace

std::string ResultCache::encode_line(const EvalResult& r) {
  Json j;
  j["key"] = r.key;
  j["status"] = status_name(r.status);
  j["metric_kind"] = metric_name(r.metric.kind);
  j["metric"] = encode_double(r.metric.value);
  j["validation_loss"] = encode_double(r.validation_loss);
  j["wall_seconds"] = encode_double(r.wall_seconds);
  j["detail"] = r.detail;
  const std::string body = j.dump();
  return crc_hex(body) + " " + body + "\n";
}

EvalResult ResultCache::decode_line(const std::string& line, std::size_t offset) {
  if (line.size() < 10 || line[8] != ' ') {
    throw FormatError("journal record lacks its checksum", offset);
  }
  const std::string body = line.substr(9);
  if (crc_hex(body) != line.substr(0, 8)) {
    throw FormatError("journal record checksum mismatch", offset);
  }
  try {
    const Json j = Json::parse(body);
    EvalResult r;
    r.key = j.at("key").get<std::string>();
    r.status = parse_status(j.at("status").get<std::string>());
    r.metric.kind = parse_metric(j.at("metric_kind").get<std::string>());
    r.metric.value = decode_double(j.at("metric"));
    r.validation_loss = decode_double(j.at("validation_loss"));
    r.wall_seconds = decode_double(j.at("wall_seconds"));
    r.detail = j.at("detail").get<std::string>();
    return r;
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad journal record: ") + e.what(), offset + 9);
  }
}

ResultCache::ResultCache(const std::filesystem::path& journal) {
  std::size_t good_end = 0;
  if (std::filesystem::exists(journal)) {
    std::ifstream in(journal, std::ios::binary);
    if (!in) throw Error("cannot read journal " + journal.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t at = 0;
    while (at < text.size()) {
      const std::size_t nl = text.find('\n', at);
      if (nl == std::string::npos) {
        ++torn_lines_;
        break;
      }
      EvalResult r = decode_line(text.substr(at, nl - at), at);
      auto it = entries_.find(r.key);
      if (it == entries_.end() || (!it->second.ok() && r.ok())) {
        entries_.insert_or_assign(r.key, std::move(r));
      }
      at = nl + 1;
      good_end = at;
    }
    if (torn_lines_ > 0) std::filesystem::resize_file(journal, good_end);
  }
  journal_.emplace(journal, std::ios::binary | std::ios::app);
  if (!*journal_) throw Error("cannot append to journal " + journal.string());
}

std::optional<EvalResult> ResultCache::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool ResultCache::record(const EvalResult& result) {
  const auto it = entries_.find(result.key);
  if (it != entries_.end() && (it->second.ok() || !result.ok())) return false;
  if (journal_) {
    *journal_ << encode_line(result);
    journal_->flush();
    if (!*journal_) throw Error("journal write failed");
  }
  entries_.insert_or_assign(result.key, result);
  return true;
}

}  // namespace glp
