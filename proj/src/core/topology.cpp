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

#include "glp/core/topology.hpp"

#include <numeric>

#include "glp/error.hpp"

namespace glp {

LayerTopology::LayerTopology(int depth) : depth_(depth) {
  if (depth < 2) {
    throw InvalidRequest("topology depth must be at least 2, got " +
                         std::to_string(depth));
  }
}

std::vector<LayerId> LayerTopology::layer_ids() const {
  std::vector<LayerId> ids(static_cast<std::size_t>(depth_));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

KeptLayers LayerTopology::kept_after(std::span<const LayerId> pruned) const {
  std::vector<bool> removed(static_cast<std::size_t>(depth_), false);
  for (LayerId id : pruned) {
    if (!contains(id)) {
      throw InvalidRequest("layer " + std::to_string(id) +
                           " is outside a depth-" + std::to_string(depth_) +
                           " topology");
    }
    if (removed[static_cast<std::size_t>(id)]) {
      throw InvalidRequest("layer " + std::to_string(id) + " pruned twice");
    }
    removed[static_cast<std::size_t>(id)] = true;
  }
  KeptLayers kept;
  for (LayerId id = 0; id < depth_; ++id) {
    if (!removed[static_cast<std::size_t>(id)]) kept.push_back(id);
  }
  if (kept.empty()) throw InvalidRequest("pruning would remove every layer");
  return kept;
}

void validate(const PruneSolution& solution, const LayerTopology& topology) {
  (void)topology.kept_after(solution.pruned);
}

std::string format_layers(std::span<const LayerId> ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(ids[i]);
  }
  return out + "]";
}

}  // namespace glp
