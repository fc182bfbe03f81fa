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

#include "glp/toy/config.hpp"

#include <sstream>

#include "glp/error.hpp"

namespace glp::toy {

void ToyConfig::validate() const {
  if (depth < 0 || width <= 0 || heads <= 0 || ffn_width <= 0 ||
      vocab_size <= 0 || max_seq_len <= 0 || num_classes <= 0) {
    throw InvalidRequest("toy config dimensions must be positive");
  }
  if (width % heads != 0) {
    throw InvalidRequest("toy width " + std::to_string(width) +
                         " is not divisible by " + std::to_string(heads) +
                         " heads");
  }
  if (!(dropout >= 0 && dropout < 1)) {
    throw InvalidRequest("dropout must lie in [0, 1)");
  }
}

std::string ToyConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "depth=" << depth << ";width=" << width << ";heads=" << heads
     << ";ffn=" << ffn_width << ";vocab=" << vocab_size
     << ";max_seq=" << max_seq_len << ";classes=" << num_classes
     << ";dropout=" << dropout;
  return os.str();
}

TrainSpec TrainSpec::toy_defaults() {
  TrainSpec spec;
  spec.learning_rate = 1e-3;
  return spec;
}

void TrainSpec::validate() const {
  if (!(learning_rate >= 0)) throw InvalidRequest("learning rate must be >= 0");
  if (batch_size <= 0 || epochs <= 0) {
    throw InvalidRequest("batch size and epochs must be positive");
  }
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) {
    throw InvalidRequest("adam betas must lie in [0, 1)");
  }
}

std::string TrainSpec::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "lr=" << learning_rate << ";beta1=" << beta1 << ";beta2=" << beta2
     << ";eps=" << epsilon << ";wd=" << weight_decay
     << ";batch=" << batch_size << ";epochs=" << epochs;
  return os.str();
}

}  // namespace glp::toy
