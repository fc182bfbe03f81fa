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

// Central finite differences, the reference for analytic gradients.

#ifndef GLP_TESTS_FINITE_DIFF_HPP_
#define GLP_TESTS_FINITE_DIFF_HPP_

#include <algorithm>

#include <Eigen/Core>

namespace glp::testing_support {

// d f / d param, one coordinate at a time; `param` is restored afterwards.
template <class M, class F>
M central_difference(M& param, F&& f, double h) {
  M grad(param.rows(), param.cols());
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double saved = param.data()[i];
    param.data()[i] = saved + h;
    const double up = f();
    param.data()[i] = saved - h;
    const double down = f();
    param.data()[i] = saved;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// ||a - b|| / max(||a|| + ||b||, floor): per-block relative error. The floor
// keeps blocks whose true gradient is zero from comparing rounding noise.
template <class M>
double relative_error(const M& a, const M& b, double floor = 1e-6) {
  return (a - b).norm() / std::max(a.norm() + b.norm(), floor);
}

}  // namespace glp::testing_support

#endif  // GLP_TESTS_FINITE_DIFF_HPP_
