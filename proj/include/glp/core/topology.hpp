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

#ifndef GLP_CORE_TOPOLOGY_HPP_
#define GLP_CORE_TOPOLOGY_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace glp {

// Index of an encoder layer; 0 is nearest the input, depth-1 nearest the
// classifier.
using LayerId = int;

// Sorted ascending list of the layers a model keeps.
using KeptLayers = std::vector<LayerId>;

// The ordered layer set of a prunable model: ids 0..depth-1.
class LayerTopology {
 public:
  // Throws InvalidRequest when depth < 2.
  explicit LayerTopology(int depth);

  int depth() const { return depth_; }
  std::vector<LayerId> layer_ids() const;
  bool contains(LayerId id) const { return id >= 0 && id < depth_; }

  // L \ pruned, sorted ascending. Throws InvalidRequest if `pruned` holds
  // duplicates or foreign ids, or would remove every layer.
  KeptLayers kept_after(std::span<const LayerId> pruned) const;

  bool operator==(const LayerTopology&) const = default;

 private:
  int depth_;
};

// Layers to remove, in the order they were chosen. For chain-producing
// algorithms every prefix of `pruned` is itself the solution for that size.
struct PruneSolution {
  std::vector<LayerId> pruned;

  std::size_t n() const { return pruned.size(); }
  bool operator==(const PruneSolution&) const = default;
};

// Throws InvalidRequest unless `solution` has distinct in-range ids and keeps
// at least one layer.
void validate(const PruneSolution& solution, const LayerTopology& topology);

// "[11,10,9]" style rendering used by reports and the CLI.
std::string format_layers(std::span<const LayerId> ids);

}  // namespace glp

#endif  // GLP_CORE_TOPOLOGY_HPP_
