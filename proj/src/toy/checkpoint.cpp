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

#include "glp/toy/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "glp/error.hpp"

namespace glp::toy {
namespace {

constexpr char kMagic[8] = {'G', 'L', 'P', 'T', 'O', 'Y', 'C', 'K'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::string take(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string("checkpoint truncated while reading ") + what,
                        pos_);
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

nlohmann::ordered_json config_echo(const ToyConfig& c) {
  nlohmann::ordered_json j;
  j["format_version"] = kCheckpointVersion;
  j["depth"] = c.depth;
  j["width"] = c.width;
  j["heads"] = c.heads;
  j["ffn_width"] = c.ffn_width;
  j["vocab_size"] = c.vocab_size;
  j["max_seq_len"] = c.max_seq_len;
  j["num_classes"] = c.num_classes;
  j["dropout"] = c.dropout;
  return j;
}

std::vector<LayerId> all_layers(int depth) {
  std::vector<LayerId> ids(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

}  // namespace

std::string serialize_checkpoint(const ToyTransformer& model) {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  const std::string header = config_echo(model.config()).dump();
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;

  std::string body;
  std::uint32_t count = 0;
  zip_tensors(all_layers(model.config().depth),
              [&](const std::string& name, const Matrix& m) {
                ++count;
                put_u32(body, static_cast<std::uint32_t>(name.size()));
                body += name;
                put_u32(body, static_cast<std::uint32_t>(m.rows()));
                put_u32(body, static_cast<std::uint32_t>(m.cols()));
                for (Eigen::Index i = 0; i < m.size(); ++i) {
                  put_u32(body, std::bit_cast<std::uint32_t>(
                                    static_cast<float>(m.data()[i])));
                }
              },
              model.weights());
  put_u32(out, count);
  return out + body;
}

ToyTransformer deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kMagic), "magic") != std::string(kMagic, sizeof(kMagic))) {
    throw FormatError("not a toy checkpoint (bad magic)", 0);
  }
  const std::size_t version_at = r.pos();
  const std::uint32_t version = r.u32("format version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint format version " +
                          std::to_string(version),
                      version_at);
  }
  const std::uint32_t header_len = r.u32("header length");
  const std::size_t header_at = r.pos();
  ToyConfig config;
  try {
    const auto h = nlohmann::json::parse(r.take(header_len, "header"));
    config.depth = h.at("depth").get<int>();
    config.width = h.at("width").get<int>();
    config.heads = h.at("heads").get<int>();
    config.ffn_width = h.at("ffn_width").get<int>();
    config.vocab_size = h.at("vocab_size").get<int>();
    config.max_seq_len = h.at("max_seq_len").get<int>();
    config.num_classes = h.at("num_classes").get<int>();
    config.dropout = h.at("dropout").get<double>();
    config.validate();
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what(), header_at);
  }

  std::map<std::string, Matrix> tensors;
  const std::uint32_t count = r.u32("tensor count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = r.pos();
    const std::string name = r.take(r.u32("name length"), "tensor name");
    const std::uint32_t rows = r.u32("rows");
    const std::uint32_t cols = r.u32("cols");
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = std::bit_cast<float>(r.u32("tensor data"));
    }
    if (!tensors.emplace(name, std::move(m)).second) {
      throw FormatError("duplicate tensor '" + name + "'", at);
    }
  }
  if (!r.done()) throw FormatError("trailing bytes after last tensor", r.pos());

  ModelWeights w;
  w.layers.resize(static_cast<std::size_t>(config.depth));
  zip_tensors(all_layers(config.depth),
              [&](const std::string& name, Matrix& m) {
                auto it = tensors.find(name);
                if (it == tensors.end()) {
                  throw FormatError("checkpoint lacks tensor '" + name + "'",
                                    bytes.size());
                }
                m = std::move(it->second);
              },
              w);
  try {
    return ToyTransformer(config, std::move(w));
  } catch (const InvalidRequest& e) {
    throw FormatError(e.what(), bytes.size());
  }
}

void save_checkpoint(const std::filesystem::path& path,
                     const ToyTransformer& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  const std::string bytes = serialize_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

ToyTransformer load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace glp::toy
