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

#include "imlab/conformal.hpp"
#include "imlab/disc_metrics.hpp"
#include "imlab/errors.hpp"
#include "imlab/extremal.hpp"
#include "support.hpp"

namespace imlab {
namespace {

const double kHalf = std::atanh(0.5);

double oracle(const PlanarDomain& d, Point z, Point w) {
  return pullback_metric(RiemannMap::build(d, z), z, w, System::kLempert).midpoint();
}

TEST_SUITE("extremal") {
  TEST_CASE("unit disc is exact for every system") {
    const Domain disc = ModelDomain::disc();
    const CaratheodoryResult c = caratheodory_lower(disc, {0.0}, {0.5});
    const LempertResult l = lempert_upper(disc, {0.0}, {0.5});
    CHECK(std::abs(c.estimate.lower - kHalf) < 1e-6);
    CHECK(c.estimate.lower <= kHalf + 1e-12);
    REQUIRE(l.candidate.has_value());
    CHECK(std::abs(l.estimate.upper - kHalf) < 1e-6);
    CHECK(l.estimate.upper >= kHalf - 1e-12);
    CHECK(l.candidate->lambda == doctest::Approx(0.5).epsilon(1e-6));
    for (System s : {System::kCaratheodory, System::kLempert, System::kKobayashi}) {
      const MetricEstimate e = estimate_system(disc, {0.0}, {0.5}, s);
      CHECK(e.lower <= kHalf + 1e-12);
      CHECK(e.upper >= kHalf - 1e-12);
      CHECK(e.gap() < 1e-4);
    }
  }

  TEST_CASE("ball: projection and linear disc close the interval") {
    const Domain ball = ModelDomain::ball(2);
    const PointN z{0.0, 0.0};
    const PointN w{0.5, 0.0};
    const double p = hyperbolic_distance(0.0, 0.5).value;
    const CaratheodoryResult c = caratheodory_lower(ball, z, w);
    const LempertResult l = lempert_upper(ball, z, w);
    CHECK(c.estimate.lower >= p - 1e-6);
    CHECK(c.estimate.lower <= p + 1e-12);
    CHECK(l.estimate.upper <= p + 1e-4);
    CHECK(l.estimate.upper >= p - 1e-12);
    CHECK(l.estimate.upper - c.estimate.lower < 2e-4);
  }

  TEST_CASE("square at degree 8 brackets the conformal value") {
    const PlanarDomain sq = make_square(1.0);
    const double o = oracle(sq, 0.0, 0.5);
    const CaratheodoryResult c = caratheodory_lower(sq, {0.0}, {0.5});
    const LempertResult l = lempert_upper(sq, {0.0}, {0.5});
    CHECK(c.estimate.lower <= o + 1e-4);
    CHECK(c.estimate.lower >= o - 1e-2);
    CHECK(l.estimate.upper >= o - 1e-4);
    CHECK(l.estimate.upper <= o + 1e-2);
    REQUIRE(l.candidate.has_value());
    // Independent re-verification of the returned disc.
    const AnalyticDiscCandidate again = verify_disc(sq, *l.candidate, {0.5}, 4096);
    CHECK(again.feasible);
    CHECK(again.certified_margin > 0.0);
    CHECK(std::abs(evaluate_disc(*l.candidate, 0.0)[0]) < 1e-10);
    CHECK(std::abs(evaluate_disc(*l.candidate, l.candidate->lambda)[0] - 0.5) < 1e-10);
    // The Caratheodory candidate maps the square into the disc.
    double sampled = 0.0;
    const double bound = candidate_sup_bound(sq, c.candidate, 1 << 14, &sampled);
    CHECK(bound >= sampled);
    CHECK(std::abs(evaluate_candidate(c.candidate, 0.0)) < 1e-10);
    CHECK(std::atanh(std::abs(evaluate_candidate(c.candidate, 0.5)) / bound) <= c.estimate.lower + 1e-9);
  }

  TEST_CASE("disc verification rejects an escaping disc") {
    const PlanarDomain sq = make_square(1.0);
    AnalyticDiscCandidate big;
    big.coefficients = {{0.0}, {1.2}};
    big.lambda = 0.5 / 1.2;
    CHECK_FALSE(verify_disc(sq, big, {0.5}, 2048).feasible);
    AnalyticDiscCandidate small;
    small.coefficients = {{0.0}, {0.9}};
    small.lambda = 0.5 / 0.9;
    const AnalyticDiscCandidate ok = verify_disc(sq, small, {0.5}, 2048);
    CHECK(ok.feasible);
    CHECK(ok.certified_margin == doctest::Approx(0.1).epsilon(0.05));
    AnalyticDiscCandidate wrong = small;
    wrong.lambda = 0.6;
    CHECK_FALSE(verify_disc(sq, wrong, {0.5}, 2048).feasible);
  }

  TEST_CASE("Kobayashi chains") {
    const Domain disc = ModelDomain::disc();
    const KobayashiResult k =
        kobayashi_upper(disc, {0.0}, {0.5}, {{0.0}, {0.25}, {0.5}});
    CHECK(k.estimate.upper >= kHalf - 1e-6);
    CHECK(std::abs(k.estimate.upper - kHalf) < 1e-6);
    const PlanarDomain sq = make_square(1.0);
    LempertOptions lo;
    lo.degree = 4;
    const double direct = lempert_upper(sq, {0.0}, {0.5}, lo).estimate.upper;
    const KobayashiResult one = kobayashi_upper(sq, {0.0}, {0.5}, {{0.0}, {0.5}}, lo);
    CHECK(one.estimate.upper <= direct + 1e-12);
    REQUIRE(one.path.size() == 2);
    CHECK_THROWS_AS(kobayashi_upper(sq, {0.0}, {0.5}, {{0.0}}, lo), ConfigError);
  }

  TEST_CASE("Green bounds") {
    const Domain disc = ModelDomain::disc();
    for (double r : {0.1, 0.4, 0.7}) {
      const MetricEstimate g = green_bounds(disc, {0.0}, {Point(0.0, r)});
      CHECK(g.lower <= r + 1e-12);
      CHECK(g.upper >= r - 1e-12);
      CHECK(g.gap() < 1e-4);
    }
    const Point a(0.3, -0.2);
    const Point b(-0.1, 0.5);
    const MetricEstimate m = green_bounds(disc, {a}, {b});
    CHECK(std::abs(m.midpoint() - mobius_distance(a, b)) < 1e-4);
    const PlanarDomain sq = make_square(1.0);
    const MetricEstimate gs = green_bounds(sq, {0.0}, {0.5});
    REQUIRE(gs.exact.has_value());
    CHECK(gs.lower <= *gs.exact + 1e-6);
    CHECK(*gs.exact <= gs.upper + 1e-6);
  }

  TEST_CASE("system ordering and inclusion monotonicity on polygons") {
    const PlanarDomain inner = make_square(1.0);
    const PlanarDomain outer = envelope(inner, 0.2);
    CaratheodoryOptions co;
    co.degree = 6;
    LempertOptions lo;
    lo.degree = 6;
    SolverConfig cfg;
    cfg.caratheodory = co;
    cfg.lempert = lo;
    const PointN z{Point(0.1, 0.2)};
    const PointN w{Point(-0.3, -0.4)};
    const MetricEstimate ci = estimate_system(inner, z, w, System::kLempert, cfg);
    const MetricEstimate co_ = estimate_system(outer, z, w, System::kLempert, cfg);
    CHECK(ci.lower <= ci.upper);
    CHECK(co_.lower <= ci.lower + 1e-2);
    CHECK(co_.upper <= ci.upper + 1e-2);
    const MetricEstimate k = estimate_system(inner, z, w, System::kKobayashi, cfg);
    CHECK(k.upper <= ci.upper + 1e-9);
    const MetricEstimate g = estimate_system(inner, z, w, System::kGreen, cfg);
    CHECK(g.lower == doctest::Approx(std::tanh(ci.lower)).epsilon(1e-9));
  }

  TEST_CASE("affine invariance on model domains") {
    const ModelDomain ball = ModelDomain::ball(2);
    const std::vector<Point> a{Point(1.0, 0.5), 0.3, Point(0.0, -0.2), 2.0};
    const PointN t{Point(0.5, 0.0), Point(-1.0, 1.0)};
    const ModelDomain image = ball.affine_image(a, t);
    const PointN z{Point(0.1, 0.0), Point(0.0, 0.2)};
    const PointN w{Point(-0.3, 0.1), Point(0.2, 0.1)};
    auto apply = [&](const PointN& v) {
      return PointN{a[0] * v[0] + a[1] * v[1] + t[0], a[2] * v[0] + a[3] * v[1] + t[1]};
    };
    for (System s : {System::kCaratheodory, System::kLempert}) {
      const MetricEstimate e0 = estimate_system(ball, z, w, s);
      const MetricEstimate e1 = estimate_system(image, apply(z), apply(w), s);
      CHECK(std::abs(e0.lower - e1.lower) < 1e-4);
      CHECK(std::abs(e0.upper - e1.upper) < 1e-4);
    }
    const Domain poly = ModelDomain::polydisc({0.0, 0.0}, {1.0, 1.0});
    const MetricEstimate pe = estimate_system(poly, z, w, System::kLempert);
    const double exact = std::max(hyperbolic_distance(z[0], w[0]).value, hyperbolic_distance(z[1], w[1]).value);
    CHECK(pe.lower <= exact + 1e-9);
    CHECK(pe.upper >= exact - 1e-9);
    CHECK(pe.gap() < 1e-4);
  }

  TEST_CASE("degree monotonicity with warm starts") {
    const PlanarDomain l = make_l_shape();
    const PointN z{Point(-0.5, -0.5)};
    const PointN w{Point(-0.5, 0.2)};
    CaratheodoryOptions co;
    co.degree = 4;
    const CaratheodoryResult c4 = caratheodory_lower(l, z, w, co);
    co.degree = 8;
    co.warm_start = c4.candidate;
    const CaratheodoryResult c8 = caratheodory_lower(l, z, w, co);
    CHECK(c8.estimate.lower >= c4.estimate.lower - 1e-8);
    LempertOptions lo;
    lo.degree = 4;
    lo.poles_per_corner = 0;
    const LempertResult l4 = lempert_upper(l, z, w, lo);
    REQUIRE(l4.candidate.has_value());
    lo.degree = 8;
    lo.warm_start = l4.candidate;
    const LempertResult l8 = lempert_upper(l, z, w, lo);
    CHECK(l8.estimate.upper <= l4.estimate.upper + 1e-8);
  }

  TEST_CASE("contractibility under polynomial maps") {
    // f(z) = a z^2 + b z maps D into the disc G of radius R when R exceeds
    // the boundary maximum of |f|.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CaratheodoryOptions co;
    co.degree = 4;
    LempertOptions lo;
    lo.degree = 4;
    for (int t = 0; t < 4; ++t) {
      const PlanarDomain d = testing::random_star_polygon(rng, 6, 0.7, 1.2);
      const Point a(u(rng), u(rng));
      const Point b(1.0 + 0.3 * u(rng), 0.3 * u(rng));
      auto f = [&](Point x) { return a * x * x + b * x; };
      double r = 0.0;
      for (Point p : d.densified_boundary(1e-3)) r = std::max(r, std::abs(f(p)));
      const Domain g = ModelDomain::disc(0.0, 1.05 * r);
      const Point z(0.1 * u(rng), 0.1 * u(rng));
      const Point w = 0.4 * Point(u(rng), u(rng));
      if (!d.contains(w) || d.boundary_distance(w) < 0.05) continue;
      const double up = lempert_upper(d, {z}, {w}, lo).estimate.upper;
      const double lowg = caratheodory_lower(g, {f(z)}, {f(w)}, co).estimate.lower;
      CHECK(lowg <= up + 1e-9);
    }
  }
}

}  // namespace
}  // namespace imlab
