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

#include "imlab/kernels.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace imlab::kernels {
namespace {

// Lowest-index tie breaking keeps serial and parallel results identical.
bool better_max(const Extremum& cand, const Extremum& cur) {
  return cand.value > cur.value || (cand.value == cur.value && cand.index < cur.index);
}
bool better_min(const Extremum& cand, const Extremum& cur) {
  return cand.value < cur.value || (cand.value == cur.value && cand.index < cur.index);
}

Point eval_poly(std::span<const Point> coeffs, Point x) {
  Point acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
  return acc;
}

template <typename Value, typename Better>
Extremum reduce_parallel(std::size_t n, double init, Value value, Better better) {
  Extremum best{init, 0};
#ifdef _OPENMP
#pragma omp parallel
  {
    Extremum local{init, 0};
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const Extremum cand{value(static_cast<std::size_t>(i)), static_cast<std::size_t>(i)};
      if (better(cand, local)) local = cand;
    }
#pragma omp critical(imlab_kernel_reduce)
    if (better(local, best)) best = local;
  }
#else
  for (std::size_t i = 0; i < n; ++i) {
    const Extremum cand{value(i), i};
    if (better(cand, best)) best = cand;
  }
#endif
  return best;
}

}  // namespace

namespace serial {

Extremum max_closure_distance(std::span<const Point> samples, const PlanarDomain& target) {
  Extremum best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Extremum cand{target.closure_distance(samples[i]), i};
    if (better_max(cand, best)) best = cand;
  }
  return best;
}

Extremum min_signed_distance(std::span<const Point> samples, const PlanarDomain& target) {
  Extremum best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Extremum cand{target.signed_distance(samples[i]), i};
    if (better_min(cand, best)) best = cand;
  }
  return best;
}

void signed_distances(std::span<const Point> samples, const PlanarDomain& target,
                      std::span<double> out) {
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = target.signed_distance(samples[i]);
}

Extremum max_abs_polynomial(std::span<const Point> samples, std::span<const Point> coeffs,
                            Point origin, double scale) {
  Extremum best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Extremum cand{std::abs(eval_poly(coeffs, (samples[i] - origin) / scale)), i};
    if (better_max(cand, best)) best = cand;
  }
  return best;
}

}  // namespace serial

Extremum max_closure_distance(std::span<const Point> samples, const PlanarDomain& target) {
  return reduce_parallel(
      samples.size(), -std::numeric_limits<double>::infinity(),
      [&](std::size_t i) { return target.closure_distance(samples[i]); }, better_max);
}

Extremum min_signed_distance(std::span<const Point> samples, const PlanarDomain& target) {
  return reduce_parallel(
      samples.size(), std::numeric_limits<double>::infinity(),
      [&](std::size_t i) { return target.signed_distance(samples[i]); }, better_min);
}

void signed_distances(std::span<const Point> samples, const PlanarDomain& target,
                      std::span<double> out) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(samples.size()); ++i) {
    out[static_cast<std::size_t>(i)] = target.signed_distance(samples[static_cast<std::size_t>(i)]);
  }
}

Extremum max_abs_polynomial(std::span<const Point> samples, std::span<const Point> coeffs,
                            Point origin, double scale) {
  return reduce_parallel(
      samples.size(), -std::numeric_limits<double>::infinity(),
      [&](std::size_t i) { return std::abs(eval_poly(coeffs, (samples[i] - origin) / scale)); },
      better_max);
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace imlab::kernels
