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

// Shared fixtures and brute-force oracles for the test binaries.

#ifndef IMLAB_TESTS_SUPPORT_HPP
#define IMLAB_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "imlab/geometry.hpp"

namespace imlab::testing {

inline constexpr double kPi = 3.14159265358979323846;

// Star-shaped polygon about the origin: n jittered angles, radii in
// [r_min, r_max].
inline PlanarDomain random_star_polygon(std::mt19937_64& rng, int n, double r_min, double r_max,
                                        double resolution = kDefaultResolution) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> v;
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * kPi * (k + 0.4 * (u(rng) - 0.5)) / n;
    v.push_back(std::polar(r_min + (r_max - r_min) * u(rng), theta));
  }
  return PlanarDomain(v, resolution);
}

// Independent point-in-polygon test (winding number).
inline bool winding_inside(const std::vector<Point>& v, Point p) {
  int wn = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % v.size()];
    const double cross = (b.real() - a.real()) * (p.imag() - a.imag()) -
                         (p.real() - a.real()) * (b.imag() - a.imag());
    if (a.imag() <= p.imag()) {
      if (b.imag() > p.imag() && cross > 0.0) ++wn;
    } else if (b.imag() <= p.imag() && cross < 0.0) {
      --wn;
    }
  }
  return wn != 0;
}

inline double segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0.0 ? ((p - a) * std::conj(d)).real() / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline double boundary_distance_brute(const std::vector<Point>& v, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    best = std::min(best, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  }
  return best;
}

// Distance from p to the closed polygon.
inline double closure_distance_brute(const std::vector<Point>& v, Point p) {
  return winding_inside(v, p) ? 0.0 : boundary_distance_brute(v, p);
}

inline std::vector<Point> dense_boundary(const std::vector<Point>& v, double spacing) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % v.size()];
    const int k = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
    for (int j = 0; j < k; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / k));
  }
  return out;
}

// Hausdorff distance of two polygon closures by exhaustive boundary sampling.
inline double hausdorff_brute(const std::vector<Point>& a, const std::vector<Point>& b,
                              double spacing) {
  double h = 0.0;
  for (Point p : dense_boundary(a, spacing)) h = std::max(h, closure_distance_brute(b, p));
  for (Point p : dense_boundary(b, spacing)) h = std::max(h, closure_distance_brute(a, p));
  return h;
}

// artanh(x) as the integral of 1 / (1 - t^2) on [0, x] (composite Simpson).
inline double artanh_by_quadrature(double x, int intervals = 2000) {
  const double h = x / intervals;
  auto f = [](double t) { return 1.0 / (1.0 - t * t); };
  double s = f(0.0) + f(x);
  for (int i = 1; i < intervals; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace imlab::testing

#endif  // IMLAB_TESTS_SUPPORT_HPP
