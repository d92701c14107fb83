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

#include <cmath>
#include <random>
#include <vector>

#include "imlab/errors.hpp"
#include "imlab/geometry.hpp"
#include "support.hpp"

namespace imlab {
namespace {

using testing::closure_distance_brute;

double square_distance(Point p, double half) {
  const double dx = std::max(std::abs(p.real()) - half, 0.0);
  const double dy = std::max(std::abs(p.imag()) - half, 0.0);
  return std::hypot(dx, dy);
}

TEST_SUITE("geometry") {
  TEST_CASE("polygon validation") {
    CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), GeometryError);
    CHECK_THROWS_AS(PlanarDomain({{0, 0}, {0, 1}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), GeometryError);
    CHECK_THROWS_AS(PlanarDomain({{0, 0}, {1, 0}, {0, 1}}, 0.0), GeometryError);
    const PlanarDomain t({{0, 0}, {1, 0}, {0, 1}});
    CHECK(t.area() == doctest::Approx(0.5));
  }

  TEST_CASE("membership and distances agree with brute force") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.6, 1.6);
    for (int trial = 0; trial < 10; ++trial) {
      const PlanarDomain d = testing::random_star_polygon(rng, 9, 0.6, 1.4);
      const PolygonIndex index(d);
      for (int k = 0; k < 200; ++k) {
        const Point p(u(rng), u(rng));
        const double b = testing::boundary_distance_brute(d.vertices(), p);
        if (b < 1e-9) continue;
        const bool in = testing::winding_inside(d.vertices(), p);
        CHECK(d.contains(p) == in);
        CHECK(d.boundary_distance(p) == doctest::Approx(b).epsilon(1e-12));
        CHECK(index.signed_distance(p) == doctest::Approx(in ? b : -b).epsilon(1e-12));
        CHECK(d.closure_distance(p) == doctest::Approx(in ? 0.0 : b).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("envelope of the square matches the rounded-square oracle") {
    const double res = 1e-2;
    const PlanarDomain sq = make_square(1.0, res);
    const PlanarDomain env = envelope(sq, 0.5);
    int checked = 0;
    for (double x = -1.7; x <= 1.7; x += 0.0371) {
      for (double y = -1.7; y <= 1.7; y += 0.0371) {
        const Point p(x, y);
        const double dist = square_distance(p, 1.0);
        if (std::abs(dist - 0.5) <= 2.0 * res) continue;
        CHECK(env.contains(p) == (dist < 0.5));
        ++checked;
      }
    }
    CHECK(checked > 5000);
    const HausdorffResult h = hausdorff(env, sq);
    CHECK(std::abs(h.distance - 0.5) <= 2.0 * res);
  }

  TEST_CASE("envelope contains the set and sits at Hausdorff distance eps for convex sets") {
    std::mt19937_64 rng(11);
    for (double eps : {0.05, 0.2, 0.4}) {
      const PlanarDomain d = make_disc_polygon(0.3, 0.8, 1e-2);
      const PlanarDomain e = envelope(d, eps);
      CHECK(compactly_contained(d, e).contained);
      CHECK(std::abs(hausdorff(e, d).distance - eps) <= 2.0 * d.resolution());
    }
    const PlanarDomain star = testing::random_star_polygon(rng, 7, 0.5, 1.2);
    const PlanarDomain e = envelope(star, 0.1);
    for (Point p : star.densified_boundary()) CHECK(e.signed_distance(p) > 0.1 - 2e-2);
  }

  TEST_CASE("erosion of the unit disc matches the radius oracle") {
    const double res = 1e-2;
    const PlanarDomain disc = make_disc_polygon(0.0, 1.0, res);
    const ErosionResult r = erode(disc, 0.3);
    REQUIRE(r.status == ErosionResult::Status::kConnected);
    const PlanarDomain& e = *r.domain;
    for (double x = -1.0; x <= 1.0; x += 0.0293) {
      for (double y = -1.0; y <= 1.0; y += 0.0293) {
        const Point p(x, y);
        const double depth = testing::boundary_distance_brute(disc.vertices(), p);
        const bool inside = disc.contains(p) && depth > 0.3;
        if (std::abs(std::abs(p) - 0.7) <= 2.0 * res) continue;
        CHECK(e.contains(p) == inside);
      }
    }
    CHECK(compactly_contained(e, disc).contained);
  }

  TEST_CASE("erosion status distinguishes empty and disconnected") {
    const PlanarDomain unit = make_rectangle(0.0, Point(1.0, 1.0));
    const ErosionResult empty = erode(unit, 0.6);
    CHECK(empty.status == ErosionResult::Status::kEmpty);
    CHECK_FALSE(empty.domain.has_value());
    // Two squares joined by a thin corridor.
    const PlanarDomain dumbbell({{0, 0}, {1, 0}, {1, 0.45}, {2, 0.45}, {2, 0}, {3, 0},
                                 {3, 1}, {2, 1}, {2, 0.55}, {1, 0.55}, {1, 1}, {0, 1}});
    const ErosionResult split = erode(dumbbell, 0.2);
    CHECK(split.status == ErosionResult::Status::kDisconnected);
    CHECK(split.components == 2);
    CHECK(split.largest_component.has_value());
  }

  TEST_CASE("Hausdorff examples") {
    const double res = 1e-2;
    const PlanarDomain a = make_disc_polygon(0.0, 1.0, res);
    const PlanarDomain b = make_disc_polygon(0.0, 1.2, res);
    CHECK(std::abs(hausdorff(a, b).distance - 0.2) <= 2.0 * res);
    CHECK(hausdorff(a, a).distance == 0.0);
    const PlanarDomain sq = make_rectangle(0.0, Point(1.0, 1.0), res);
    const PlanarDomain moved = sq.transformed(1.0, Point(0.3, 0.0));
    const HausdorffResult h = hausdorff(sq, moved);
    const double oracle = testing::hausdorff_brute(sq.vertices(), moved.vertices(), 0.5 * res);
    CHECK(oracle == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(std::abs(h.distance - oracle) <= 2.0 * res);
    CHECK(h.distance == std::max(h.directed_a_to_b, h.directed_b_to_a));
    CHECK(std::abs(h.witness_a_to_b.first - h.witness_a_to_b.second) ==
          doctest::Approx(h.directed_a_to_b));
  }

  TEST_CASE("Hausdorff agrees with the brute-force oracle on random pairs") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 12; ++t) {
      const PlanarDomain a = testing::random_star_polygon(rng, 8, 0.5, 1.3, 2e-2);
      const PlanarDomain b = testing::random_star_polygon(rng, 6, 0.5, 1.3, 2e-2);
      const double oracle = testing::hausdorff_brute(a.vertices(), b.vertices(), 5e-3);
      const HausdorffResult h = hausdorff(a, b);
      CHECK(std::abs(h.distance - oracle) <= 2.0 * a.resolution());
      CHECK(hausdorff(b, a).distance == h.distance);
    }
  }

  TEST_CASE("compact containment") {
    const PlanarDomain half = make_disc_polygon(0.0, 0.5);
    const PlanarDomain unit = make_disc_polygon(0.0, 1.0);
    const ContainmentResult c = compactly_contained(half, unit);
    CHECK(c.contained);
    CHECK(c.margin == doctest::Approx(0.5).epsilon(2e-2));
    CHECK_FALSE(compactly_contained(unit, unit).contained);
    CHECK_FALSE(compactly_contained(unit, half).contained);
    CHECK(compactly_contained(unit, half).margin < 0.0);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 5; ++t) {
      const PlanarDomain d = testing::random_star_polygon(rng, 8, 0.8, 1.4);
      const ErosionResult inner = erode(d, 0.2);
      if (inner.status != ErosionResult::Status::kConnected) continue;
      const ContainmentResult r = compactly_contained(*inner.domain, envelope(d, 0.2));
      CHECK(r.contained);
      CHECK(r.margin >= 0.4 - 3.0 * d.resolution());
    }
  }

  TEST_CASE("contains_compact margin rule") {
    const PlanarDomain unit = make_disc_polygon(0.0, 1.0);
    const std::vector<Point> k1{0.0, 0.5};
    const std::vector<Point> k2{0.999999};
    CHECK(contains_compact(unit, k1));
    CHECK_FALSE(contains_compact(unit, k2));
    CHECK_THROWS_AS(contains_compact(unit, std::vector<Point>{}), GeometryError);
  }

  TEST_CASE("envelope and Hausdorff duality") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 6; ++t) {
      const PlanarDomain a = testing::random_star_polygon(rng, 7, 0.6, 1.2);
      const PlanarDomain b = testing::random_star_polygon(rng, 7, 0.6, 1.2);
      const double h = hausdorff(a, b).distance;
      const double res = a.resolution();
      CHECK(compactly_contained(a, envelope(b, h + 3.0 * res)).margin > -1e-12);
      CHECK(compactly_contained(b, envelope(a, h + 3.0 * res)).margin > -1e-12);
    }
  }

  TEST_CASE("offset round trips on convex sets") {
    const PlanarDomain d = make_square(1.0, 1e-2);
    const double eps = 0.25;
    const ErosionResult back = erode(envelope(d, eps), eps);
    REQUIRE(back.domain.has_value());
    for (Point p : d.densified_boundary(0.05)) {
      CHECK(back.domain->signed_distance(p) > -2.0 * d.resolution());
    }
    const ErosionResult in = erode(d, eps);
    REQUIRE(in.domain.has_value());
    const PlanarDomain round = envelope(*in.domain, eps);
    for (Point p : round.densified_boundary(0.05)) {
      CHECK(closure_distance_brute(d.vertices(), p) <= 2.0 * d.resolution());
    }
  }

  TEST_CASE("compact containment is transitive on nested triples") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 5; ++t) {
      const PlanarDomain mid = testing::random_star_polygon(rng, 8, 0.8, 1.3);
      const ErosionResult inner = erode(mid, 0.1);
      REQUIRE(inner.domain.has_value());
      const PlanarDomain outer = envelope(mid, 0.1);
      CHECK(compactly_contained(*inner.domain, mid).contained);
      CHECK(compactly_contained(mid, outer).contained);
      CHECK(compactly_contained(*inner.domain, outer).contained);
      CHECK_FALSE(compactly_contained(outer, *inner.domain).contained);
    }
  }

  TEST_CASE("model domains") {
    const ModelDomain ball = ModelDomain::ball(2);
    CHECK(ball.contains({0.6, Point(0.0, 0.7)}));
    CHECK_FALSE(ball.contains({0.8, Point(0.0, 0.7)}));
    CHECK(ball.normalized_margin({0.6, 0.0}) == doctest::Approx(0.4));
    const ModelDomain poly = ModelDomain::polydisc({0.0, 0.0}, {1.0, 2.0});
    CHECK(poly.contains({0.9, 1.9}));
    CHECK_FALSE(poly.contains({0.9, 2.1}));
    CHECK(poly.linear_form_sup({0.5, Point(0.0, 0.25)}) == doctest::Approx(0.75));
    const ModelDomain image = ball.affine_image({2.0, 0.0, 0.0, 1.0}, {1.0, 0.0});
    CHECK(image.contains({2.8, 0.0}));
    CHECK_FALSE(image.contains({3.2, 0.0}));
    const PointN z{Point(0.3, -0.2), Point(0.1, 0.4)};
    const PointN back = image.denormalized(image.normalized(z));
    CHECK(std::abs(back[0] - z[0]) < 1e-14);
    CHECK(std::abs(back[1] - z[1]) < 1e-14);
    CHECK_THROWS_AS(ball.affine_image({1.0, 2.0, 2.0, 4.0}, {0.0, 0.0}), GeometryError);
    CHECK_THROWS_AS(ModelDomain::polydisc({0.0}, {-1.0}), GeometryError);
  }
}

}  // namespace
}  // namespace imlab
