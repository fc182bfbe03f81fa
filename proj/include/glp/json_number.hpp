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

// JSON has no infinities or NaN. Scores use them (failed trials score -inf,
// missing losses are NaN), so they travel as the strings "-inf", "inf" and
// "nan"; finite values stay numbers and round-trip exactly.

#ifndef GLP_JSON_NUMBER_HPP_
#define GLP_JSON_NUMBER_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace glp {

inline nlohmann::ordered_json encode_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

// Throws std::invalid_argument on anything but a number or one of the three
// spellings above.
inline double decode_double(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a number, \"-inf\", \"inf\" or \"nan\"");
}

}  // namespace glp

#endif  // GLP_JSON_NUMBER_HPP_
