// Copyright 2026 The imlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Small dense local optimizers used by the extremal solvers.

#ifndef IMLAB_SRC_OPTIMIZE_HPP
#define IMLAB_SRC_OPTIMIZE_HPP

#include <functional>
#include <vector>

namespace imlab::detail {

struct OptimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// Derivative-free minimization with an adaptive simplex.
OptimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x0, double step, int max_evaluations,
                           double tolerance);

// Quasi-Newton minimization. `fg` returns the value and fills the gradient.
// `stop` is consulted after every accepted step.
OptimizeResult bfgs(
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& fg,
    std::vector<double> x0, int max_iterations, double gradient_tolerance,
    const std::function<bool(const std::vector<double>&, double)>& stop = {});

}  // namespace imlab::detail

#endif  // IMLAB_SRC_OPTIMIZE_HPP
