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

// Data-parallel reductions over point samples. Each kernel has a serial
// reference in `imlab::kernels::serial` with identical results; the default
// versions use OpenMP when available. Max/min reductions are exact, so the
// two paths agree bit for bit (ties resolve to the lowest index).

#ifndef IMLAB_KERNELS_HPP
#define IMLAB_KERNELS_HPP

#include <cstddef>
#include <span>

#include "imlab/geometry.hpp"

namespace imlab::kernels {

struct Extremum {
  double value = 0.0;
  std::size_t index = 0;
};

// max_i dist(samples[i], closure(target)).
Extremum max_closure_distance(std::span<const Point> samples,
                              const PlanarDomain& target);
// min_i signed_distance(samples[i], target).
Extremum min_signed_distance(std::span<const Point> samples,
                             const PlanarDomain& target);
// out[i] = signed_distance(samples[i], target).
void signed_distances(std::span<const Point> samples,
                      const PlanarDomain& target, std::span<double> out);
// max_i |p(samples[i])| for p(x) = sum_k coeffs[k] * ((x - origin) / scale)^k.
Extremum max_abs_polynomial(std::span<const Point> samples,
                            std::span<const Point> coeffs, Point origin,
                            double scale);

namespace serial {
Extremum max_closure_distance(std::span<const Point> samples,
                              const PlanarDomain& target);
Extremum min_signed_distance(std::span<const Point> samples,
                             const PlanarDomain& target);
void signed_distances(std::span<const Point> samples,
                      const PlanarDomain& target, std::span<double> out);
Extremum max_abs_polynomial(std::span<const Point> samples,
                            std::span<const Point> coeffs, Point origin,
                            double scale);
}  // namespace serial

// Number of worker threads the parallel kernels use (1 without OpenMP).
int worker_count();

}  // namespace imlab::kernels

#endif  // IMLAB_KERNELS_HPP
