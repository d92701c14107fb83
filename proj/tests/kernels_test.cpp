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

#include <doctest.h>

#include <random>
#include <vector>

#include "imlab/kernels.hpp"
#include "support.hpp"

namespace imlab {
namespace {

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  std::vector<Point> out(n);
  for (Point& p : out) p = Point(u(rng), u(rng));
  return out;
}

TEST_SUITE("kernels") {
  TEST_CASE("parallel kernels match their serial twins") {
    std::mt19937_64 rng(41);
    CHECK(kernels::worker_count() >= 1);
    for (int t = 0; t < 5; ++t) {
      const PlanarDomain d = testing::random_star_polygon(rng, 12, 0.6, 1.3);
      const std::vector<Point> pts = random_points(rng, 5000, 1.5);
      const kernels::Extremum a = kernels::max_closure_distance(pts, d);
      const kernels::Extremum b = kernels::serial::max_closure_distance(pts, d);
      CHECK(a.value == b.value);
      CHECK(a.index == b.index);
      const kernels::Extremum c = kernels::min_signed_distance(pts, d);
      const kernels::Extremum e = kernels::serial::min_signed_distance(pts, d);
      CHECK(c.value == e.value);
      CHECK(c.index == e.index);
      std::vector<double> x(pts.size());
      std::vector<double> y(pts.size());
      kernels::signed_distances(pts, d, x);
      kernels::serial::signed_distances(pts, d, y);
      CHECK(x == y);
      const std::vector<Point> coeffs = random_points(rng, 9, 1.0);
      const kernels::Extremum p = kernels::max_abs_polynomial(pts, coeffs, Point(0.1, 0.2), 1.5);
      const kernels::Extremum q = kernels::serial::max_abs_polynomial(pts, coeffs, Point(0.1, 0.2), 1.5);
      CHECK(p.value == q.value);
      CHECK(p.index == q.index);
    }
  }

  TEST_CASE("kernels agree with brute force") {
    std::mt19937_64 rng(43);
    const PlanarDomain d = testing::random_star_polygon(rng, 9, 0.6, 1.3);
    const std::vector<Point> pts = random_points(rng, 400, 1.5);
    std::vector<double> s(pts.size());
    kernels::signed_distances(pts, d, s);
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double b = testing::boundary_distance_brute(d.vertices(), pts[i]);
      const bool in = testing::winding_inside(d.vertices(), pts[i]);
      CHECK(s[i] == doctest::Approx(in ? b : -b).epsilon(1e-12));
      worst = std::max(worst, testing::closure_distance_brute(d.vertices(), pts[i]));
    }
    CHECK(kernels::max_closure_distance(pts, d).value == doctest::Approx(worst).epsilon(1e-12));
  }
}

}  // namespace
}  // namespace imlab
