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

// Toy checkpoint container, layout documented in docs/checkpoint_format.md:
//
//   "GLPTOYCK"                  8-byte magic
//   u32 format_version          currently 1
//   u32 header_bytes
//   header                      JSON config echo
//   u32 tensor_count
//   tensor_count x {
//     u32 name_bytes, name,     e.g. "layer3.query_w"
//     u32 rows, u32 cols,
//     rows*cols float32         row-major
//   }
//
// Integers and floats are little-endian.

#ifndef GLP_TOY_CHECKPOINT_HPP_
#define GLP_TOY_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "glp/toy/model.hpp"

namespace glp::toy {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const ToyTransformer& model);
// Throws FormatError (with byte offset) on malformed input or an unsupported
// version.
ToyTransformer deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path,
                     const ToyTransformer& model);
ToyTransformer load_checkpoint(const std::filesystem::path& path);

}  // namespace glp::toy

#endif  // GLP_TOY_CHECKPOINT_HPP_
