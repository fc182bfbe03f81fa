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

#include "glp/bridge/wire.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "glp/error.hpp"
#include "glp/json_number.hpp"

namespace glp::bridge {
namespace {

using Json = nlohmann::ordered_json;

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Offset of `"name"` in the line, or of the line itself.
std::size_t field_offset(std::string_view line, std::size_t offset,
                         const std::string& name) {
  const std::size_t at = line.find("\"" + name + "\"");
  return offset + (at == std::string_view::npos ? 0 : at);
}

std::string_view status_text(WireStatus s) {
  return s == WireStatus::kOk ? "ok" : "failed";
}

struct Encoder {
  std::string operator()(const WireHello& h) const {
    Json j;
    j["type"] = "hello";
    j["protocol"] = h.protocol;
    j["agent"] = h.agent;
    return j.dump();
  }
  std::string operator()(const WireRequest& r) const {
    Json j;
    j["type"] = "evaluate";
    j["protocol"] = kProtocolVersion;
    j["id"] = r.id;
    j["task"] = r.task;
    j["locator"] = r.locator;
    j["kept_layers"] = r.kept_layers;
    j["seed"] = r.seed;
    j["hyperparameters"] = Json{{"learning_rate", r.hyperparameters.learning_rate},
                                {"batch_size", r.hyperparameters.batch_size},
                                {"epochs", r.hyperparameters.epochs},
                                {"max_seq_len", r.hyperparameters.max_seq_len}};
    j["metric"] = metric_name(r.metric);
    return j.dump();
  }
  std::string operator()(const WireResponse& r) const {
    Json j;
    j["type"] = "result";
    j["id"] = r.id;
    j["status"] = status_text(r.status);
    j["metric"] = encode_double(r.metric);
    j["validation_loss"] = encode_double(r.validation_loss);
    j["wall_seconds"] = encode_double(r.wall_seconds);
    j["worker"] = r.worker;
    j["detail"] = r.detail;
    return j.dump();
  }
  std::string operator()(const WireError& e) const {
    Json j;
    j["type"] = "error";
    j["id"] = e.id ? Json(*e.id) : Json(nullptr);
    j["message"] = e.message;
    j["offset"] = e.offset;
    return j.dump();
  }
};

class Decoder {
 public:
  Decoder(std::string_view line, std::size_t offset, const Json& j)
      : line_(line), offset_(offset), j_(j) {}

  WireMessage decode() {
    const std::string type = get<std::string>("type");
    if (type == "hello") {
      WireHello h;
      h.protocol = get<int>("protocol");
      check_version(h.protocol);
      h.agent = get<std::string>("agent");
      return h;
    }
    if (type == "evaluate") {
      check_version(get<int>("protocol"));
      WireRequest r;
      r.id = get<std::uint64_t>("id");
      r.task = get<std::string>("task");
      r.locator = get<std::string>("locator");
      r.kept_layers = get<std::vector<LayerId>>("kept_layers");
      if (!std::is_sorted(r.kept_layers.begin(), r.kept_layers.end()) ||
          std::adjacent_find(r.kept_layers.begin(), r.kept_layers.end()) !=
              r.kept_layers.end()) {
        fail("kept_layers must be strictly ascending", "kept_layers");
      }
      r.seed = get<std::uint64_t>("seed");
      const Json& h = at("hyperparameters");
      Decoder sub(line_, offset_, h);
      r.hyperparameters.learning_rate = sub.get<double>("learning_rate");
      r.hyperparameters.batch_size = sub.get<int>("batch_size");
      r.hyperparameters.epochs = sub.get<int>("epochs");
      r.hyperparameters.max_seq_len = sub.get<int>("max_seq_len");
      try {
        r.metric = parse_metric(get<std::string>("metric"));
      } catch (const InvalidRequest& e) {
        fail(e.what(), "metric");
      }
      return r;
    }
    if (type == "result") {
      WireResponse r;
      r.id = get<std::uint64_t>("id");
      const std::string status = get<std::string>("status");
      if (status == "ok") {
        r.status = WireStatus::kOk;
      } else if (status == "failed") {
        r.status = WireStatus::kFailed;
      } else {
        fail("unknown status '" + status + "'", "status");
      }
      r.metric = number("metric");
      r.validation_loss = number("validation_loss");
      r.wall_seconds = number("wall_seconds");
      r.worker = get<std::string>("worker");
      r.detail = j_.contains("detail") ? get<std::string>("detail") : "";
      if (r.status == WireStatus::kOk && !std::isfinite(r.metric)) {
        fail("ok result with a non-finite metric", "metric");
      }
      return r;
    }
    if (type == "error") {
      WireError e;
      if (!at("id").is_null()) e.id = get<std::uint64_t>("id");
      e.message = get<std::string>("message");
      e.offset = get<std::uint64_t>("offset");
      return e;
    }
    fail("unknown message type '" + type + "'", "type");
  }

 private:
  [[noreturn]] void fail(const std::string& what, const std::string& field) const {
    throw FormatError(what, field_offset(line_, offset_, field));
  }

  const Json& at(const std::string& name) const {
    if (!j_.is_object() || !j_.contains(name)) fail("missing field '" + name + "'", name);
    return j_.at(name);
  }

  template <typename T>
  T get(const std::string& name) const {
    const Json& v = at(name);
    try {
      if constexpr (std::is_integral_v<T> || std::is_same_v<T, std::vector<LayerId>>) {
        // No silent float-to-int or sign conversion.
        auto integral = [](const Json& x) { return x.is_number_integer(); };
        if constexpr (std::is_integral_v<T>) {
          if (!integral(v)) throw std::invalid_argument("not an integer");
          if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned()) {
            throw std::invalid_argument("negative");
          }
        } else {
          if (!v.is_array() || !std::all_of(v.begin(), v.end(), integral)) {
            throw std::invalid_argument("not an integer array");
          }
        }
      }
      return v.get<T>();
    } catch (const std::exception& e) {
      fail("field '" + name + "' has the wrong type (" + e.what() + ")", name);
    }
  }

  double number(const std::string& name) const {
    try {
      return decode_double(at(name));
    } catch (const std::invalid_argument& e) {
      fail("field '" + name + "': " + e.what(), name);
    }
  }

  void check_version(int version) const {
    if (version != kProtocolVersion) {
      fail("protocol version " + std::to_string(version) + " is not supported (expected " +
               std::to_string(kProtocolVersion) + ")",
           "protocol");
    }
  }

  std::string_view line_;
  std::size_t offset_;
  const Json& j_;
};

}  // namespace

std::string WireHyperparameters::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "lr=" << learning_rate << ";batch=" << batch_size << ";epochs=" << epochs
     << ";max_seq_len=" << max_seq_len;
  return os.str();
}

bool WireResponse::operator==(const WireResponse& o) const {
  return id == o.id && status == o.status && same_bits(metric, o.metric) &&
         same_bits(validation_loss, o.validation_loss) &&
         same_bits(wall_seconds, o.wall_seconds) && worker == o.worker &&
         detail == o.detail;
}

std::string encode(const WireMessage& message) {
  return std::visit(Encoder{}, message) + "\n";
}

WireMessage decode(std::string_view line, std::size_t offset) {
  if (line.find('\n') != std::string_view::npos) {
    throw FormatError("a message must fit on one line", offset + line.find('\n'));
  }
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("malformed message: ") + e.what(),
                      offset + (e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!j.is_object()) throw FormatError("a message must be a JSON object", offset);
  return Decoder(line, offset, j).decode();
}

std::optional<std::uint64_t> salvage_id(std::string_view line) {
  const Json j = Json::parse(line, nullptr, false);
  if (j.is_object() && j.contains("id") && j["id"].is_number_unsigned()) {
    return j["id"].get<std::uint64_t>();
  }
  return std::nullopt;
}

void LineReader::feed(std::string_view bytes) {
  buffer_.append(bytes);
}

std::optional<LineReader::Line> LineReader::next() {
  const std::size_t nl = buffer_.find('\n');
  if (nl == std::string::npos) return std::nullopt;
  Line line{buffer_.substr(0, nl), buffer_offset_};
  if (!line.text.empty() && line.text.back() == '\r') line.text.pop_back();
  buffer_.erase(0, nl + 1);
  buffer_offset_ += nl + 1;
  consumed_ = buffer_offset_;
  return line;
}

void LineReader::finish() const {
  if (!buffer_.empty()) {
    throw FormatError("stream ended inside a line (" + std::to_string(buffer_.size()) +
                          " bytes without a newline)",
                      buffer_offset_);
  }
}

void IdRegistry::open(std::uint64_t id, std::size_t offset) {
  if (!seen_.insert(id).second) {
    throw FormatError("duplicate request id " + std::to_string(id), offset);
  }
  pending_.insert(id);
}

bool IdRegistry::close(std::uint64_t id) {
  return pending_.erase(id) > 0;
}

}  // namespace glp::bridge
