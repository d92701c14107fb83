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

// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "imlab/conformal.hpp"
#include "imlab/disc_metrics.hpp"
#include "imlab/errors.hpp"
#include "imlab/extremal.hpp"
#include "imlab/geometry.hpp"
#include "imlab/harness.hpp"
#include "support.hpp"

#ifndef IMLAB_CONFIG_DIR
#define IMLAB_CONFIG_DIR "configs"
#endif

namespace imlab {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool contains_value(const MetricEstimate& e, double v) { return e.lower <= v && v <= e.upper; }

std::string config_path(const std::string& name) {
  return std::string(IMLAB_CONFIG_DIR) + "/" + name + ".json";
}

// --- 1: disc ground truth ---------------------------------------------------

Outcome disc_ground_truth() {
  const auto t0 = Clock::now();
  const Domain disc = ModelDomain::disc();
  const double p = std::atanh(0.5);
  bool ok = true;
  double worst = 0.0;
  for (System s : {System::kCaratheodory, System::kLempert, System::kKobayashi}) {
    const MetricEstimate e = estimate_system(disc, {0.0}, {0.5}, s);
    ok = ok && contains_value(e, p) && e.gap() < 1e-4;
    worst = std::max(worst, e.gap());
  }
  const MetricEstimate g = estimate_system(disc, {0.0}, {0.5}, System::kGreen);
  ok = ok && contains_value(g, 0.5) && g.gap() < 1e-4;
  worst = std::max(worst, g.gap());
  const double t = seconds_since(t0);
  ok = ok && t < 10.0;
  return {ok, "max gap " + fmt("%.2e", worst) + ", " + fmt("%.2f", t) + " s"};
}

// --- 2: ball certification --------------------------------------------------

Outcome ball_certification() {
  const auto t0 = Clock::now();
  const Domain ball = ModelDomain::ball(2);
  const PointN z{0.0, 0.0};
  const PointN w{0.5, 0.0};
  const double p = hyperbolic_distance(0.0, 0.5).value;
  const double c = caratheodory_lower(ball, z, w).estimate.lower;
  const double l = lempert_upper(ball, z, w).estimate.upper;
  const double t = seconds_since(t0);
  const bool ok = c <= p && p <= l && l - c < 5e-4 && t < 30.0;
  return {ok, "c " + fmt("%.9f", c) + ", l " + fmt("%.9f", l) + ", gap " + fmt("%.2e", l - c) + ", " +
                  fmt("%.2f", t) + " s"};
}

// --- 3: conformal oracle consistency ----------------------------------------

Outcome oracle_consistency() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CaratheodoryOptions co;
  co.degree = 8;
  LempertOptions lo;
  lo.degree = 8;
  lo.poles_per_corner = 4;
  std::vector<double> gaps;
  int violations = 0;
  for (int k = 0; k < 25; ++k) {
    const PlanarDomain d = testing::random_star_polygon(rng, 5 + static_cast<int>(u(rng) * 8), 0.7, 1.3);
    for (int q = 0; q < 3; ++q) {
      const Point z = 0.0;
      const double theta = 2.0 * testing::kPi * u(rng);
      double lo_r = 0.0;
      double hi_r = 2.0;
      for (int it = 0; it < 50; ++it) {
        const double m = 0.5 * (lo_r + hi_r);
        (d.contains(std::polar(m, theta)) ? lo_r : hi_r) = m;
      }
      const Point w = std::polar(lo_r * (0.3 + 0.3 * u(rng)), theta);
      const MetricEstimate o = pullback_metric(RiemannMap::build(d, z), z, w, System::kLempert);
      const double c = caratheodory_lower(d, {z}, {w}, co).estimate.lower;
      const double l = lempert_upper(d, {z}, {w}, lo).estimate.upper;
      violations += (c > o.upper) + (l < o.lower);
      gaps.push_back(l - c);
    }
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = gaps[gaps.size() / 2];
  const double t = seconds_since(t0);
  const bool ok = violations == 0 && median < 2e-2 && t < 600.0;
  return {ok, std::to_string(gaps.size()) + " pairs, " + std::to_string(violations) + " violations, median gap " +
                  fmt("%.3e", median) + ", " + fmt("%.1f", t) + " s"};
}

// --- 4: contractibility -----------------------------------------------------

Point poly_eval(const std::vector<Point>& c, Point x) {
  Point s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

Outcome contractibility() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CaratheodoryOptions co;
  co.degree = 6;
  LempertOptions lo;
  lo.degree = 4;
  lo.poles_per_corner = 0;
  int violations = 0;
  int done = 0;
  double closest = 1e300;
  while (done < 200) {
    const int kind = done % 3;
    const PlanarDomain poly = testing::random_star_polygon(rng, 6 + done % 5, 0.7, 1.3);
    std::vector<Point> f{0.0, Point(1.0 + 0.3 * u(rng), 0.3 * u(rng)), 0.3 * Point(u(rng), u(rng)),
                         0.1 * Point(u(rng), u(rng))};
    double lower_g = 0.0;
    double upper_d = 0.0;
    if (kind == 0) {
      // D = unit disc (exact p), G = polygon containing f(closure D).
      const Point z = 0.5 * Point(u(rng), u(rng));
      const Point w = 0.5 * Point(u(rng), u(rng));
      double reach = 0.0;
      std::vector<Point> image;
      for (int k = 0; k < 4096; ++k) {
        image.push_back(poly_eval(f, std::polar(1.0, 2.0 * testing::kPi * k / 4096)));
        reach = std::max(reach, std::abs(image.back()));
      }
      // Scale f so the image sits inside the polygon with margin; the
      // argument principle extends the circle check to the disc.
      const double s = 0.6 / reach;
      for (Point& c : f) c *= s;
      bool inside = true;
      for (const Point& p : image) inside = inside && poly.signed_distance(s * p) > 0.05;
      if (!inside) continue;
      const Point fz = poly_eval(f, z);
      const Point fw = poly_eval(f, w);
      if (std::abs(fz - fw) < 1e-3) continue;
      lower_g = caratheodory_lower(poly, {fz}, {fw}, co).estimate.lower;
      upper_d = hyperbolic_distance(z, w).value;
    } else if (kind == 1) {
      // D = polygon, G = disc of radius above the boundary maximum of |f|.
      const std::vector<Point> b = poly.densified_boundary(1e-3);
      double reach = 0.0;
      for (const Point& p : b) reach = std::max(reach, std::abs(poly_eval(f, p)));
      const Domain g = ModelDomain::disc(0.0, 1.05 * reach + 0.01);
      const Point z = 0.2 * Point(u(rng), u(rng));
      const Point w = 0.4 * Point(u(rng), u(rng));
      if (poly.signed_distance(w) < 0.05 || std::abs(z - w) < 1e-3) continue;
      lower_g = caratheodory_lower(g, {poly_eval(f, z)}, {poly_eval(f, w)}, co).estimate.lower;
      upper_d = lempert_upper(poly, {z}, {w}, lo).estimate.upper;
    } else {
      // D = polygon, f = (f1, f2) into a ball of radius above the boundary
      // maximum of |f| (subharmonic).
      const std::vector<Point> f2{0.0, 0.5 * Point(u(rng), u(rng)), 0.5 * Point(u(rng), u(rng))};
      const std::vector<Point> b = poly.densified_boundary(1e-3);
      double reach = 0.0;
      for (const Point& p : b) {
        reach = std::max(reach, std::hypot(std::abs(poly_eval(f, p)), std::abs(poly_eval(f2, p))));
      }
      const Domain g = ModelDomain::ball(2, {0.0, 0.0}, 1.05 * reach + 0.01);
      const Point z = 0.2 * Point(u(rng), u(rng));
      const Point w = 0.4 * Point(u(rng), u(rng));
      if (poly.signed_distance(w) < 0.05 || std::abs(z - w) < 1e-3) continue;
      lower_g = caratheodory_lower(g, {poly_eval(f, z), poly_eval(f2, z)},
                                   {poly_eval(f, w), poly_eval(f2, w)}, co)
                    .estimate.lower;
      upper_d = lempert_upper(poly, {z}, {w}, lo).estimate.upper;
    }
    violations += lower_g > upper_d + 1e-9;
    closest = std::min(closest, upper_d - lower_g);
    ++done;
  }
  const double t = seconds_since(t0);
  return {violations == 0, std::to_string(done) + " triples, " + std::to_string(violations) +
                               " violations, smallest margin " + fmt("%.3e", closest) + ", " +
                               fmt("%.1f", t) + " s"};
}

// --- 5 and 9: wobble convergence --------------------------------------------

std::map<std::string, std::string> g_report_bytes;

std::string report_bytes(const ConvergenceReport& r) {
  return report_csv(r) + "\n" + plot_csv(r) + "\n" + report_json(r).dump(2);
}

Outcome wobble_convergence() {
  bool ok = true;
  std::ostringstream detail;
  for (const char* name : {"square_radial", "square_alternating", "square_spiky", "l_shape_radial",
                           "l_shape_alternating", "l_shape_spiky"}) {
    const auto t0 = Clock::now();
    const ExperimentConfig c = load_config(config_path(name));
    const ConvergenceReport r = run_convergence_experiment(c);
    const double t = seconds_since(t0);
    g_report_bytes[name] = report_bytes(r);
    write_report(r, std::string("acceptance_out/") + name);
    double worst = 0.0;
    bool windows = true;
    for (const ConvergenceSummary& s : r.summary) {
      worst = std::max(worst, s.max_window_gap);
      windows = windows && s.pass;
    }
    const bool witnesses = r.last_not_increasing >= c.final_window.first &&
                           r.last_not_decreasing >= c.final_window.first;
    const bool this_ok = r.aborted.empty() && r.all_pass && windows && witnesses && worst < 1e-2 &&
                         c.depth == 30 && t < 1200.0;
    ok = ok && this_ok;
    detail << (detail.tellp() > 0 ? "; " : "") << name << " max gap " << fmt("%.2e", worst) << " "
           << fmt("%.0f", t) << " s" << (this_ok ? "" : " (fail)");
  }
  return {ok, detail.str()};
}

Outcome determinism() {
  const std::string name = "square_alternating";
  if (g_report_bytes.count(name) == 0) {
    g_report_bytes[name] = report_bytes(run_convergence_experiment(load_config(config_path(name))));
  }
  const std::string again = report_bytes(run_convergence_experiment(load_config(config_path(name))));
  const bool ok = again == g_report_bytes[name];
  return {ok, name + ": " + std::to_string(again.size()) + " bytes, " + (ok ? "identical" : "different")};
}

// --- 6: sandwich certificate ------------------------------------------------

Outcome sandwich_certificate() {
  const auto t0 = Clock::now();
  const ExperimentConfig c = load_config(config_path("disc_sandwich"));
  const ConvergenceReport r = run_sandwich_experiment(c);
  write_report(r, "acceptance_out/disc_sandwich");
  if (!r.sandwich || !r.sandwich_report) return {false, "sandwich not built: " + r.aborted};
  int chains = 0;
  bool holds = true;
  for (const SandwichRow& row : r.sandwich_report->rows) {
    ++chains;
    holds = holds && row.chain_holds;
  }
  const int case2 = r.sandwich->count_case2();
  const bool ok = r.aborted.empty() && case2 >= 1 && r.sandwich_reverify_failures.empty() && holds &&
                  r.sandwich_report->failures == 0 && chains > 0;
  return {ok, std::to_string(r.sandwich->pairing.size()) + " entries, " + std::to_string(case2) +
                  " case-2 stages, " + std::to_string(r.sandwich_reverify_failures.size()) +
                  " re-verification failures, " + std::to_string(chains) + " chains, " +
                  std::to_string(r.sandwich_report->failures) + " FAILURE flags, " + fmt("%.0f", seconds_since(t0)) +
                  " s"};
}

// --- 7: Green track on the hyperconvex exterior sequence --------------------

Outcome green_track() {
  const auto t0 = Clock::now();
  const ExperimentConfig c = load_config(config_path("disc_green_hyperconvex"));
  const ConvergenceReport r = run_convergence_experiment(c);
  write_report(r, "acceptance_out/disc_green_hyperconvex");
  double gap20 = 1.0;
  for (const ConvergenceRow& row : r.rows) {
    if (row.n == 20 && row.system == System::kGreen) gap20 = row.gap;
  }
  const bool ok = r.aborted.empty() && r.all_pass && gap20 < 1e-2;
  return {ok, "gap at k = 20 " + fmt("%.3e", gap20) + ", " + fmt("%.0f", seconds_since(t0)) + " s"};
}

// --- 8: geometry kernel -----------------------------------------------------

Outcome geometry_kernel() {
  const double res = 1e-2;
  std::vector<std::string> failed;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) failed.push_back(what);
  };
  const PlanarDomain sq = make_square(1.0, res);
  const PlanarDomain env = envelope(sq, 0.5);
  expect(std::abs(hausdorff(env, sq).distance - 0.5) <= 2 * res, "envelope(square, 0.5)");
  expect(compactly_contained(sq, env).contained, "envelope contains D");
  const PlanarDomain disc = make_disc_polygon(0.0, 1.0, res);
  const ErosionResult er = erode(disc, 0.3);
  expect(er.domain && std::abs(hausdorff(*er.domain, make_disc_polygon(0.0, 0.7, res)).distance) <= 2 * res,
         "erode(disc, 0.3)");
  expect(er.domain && compactly_contained(*er.domain, disc).contained, "erosion inside D");
  expect(erode(make_rectangle(0.0, Point(1, 1), res), 0.6).status == ErosionResult::Status::kEmpty,
         "erode(unit square, 0.6) empty");
  expect(std::abs(hausdorff(disc, make_disc_polygon(0.0, 1.2, res)).distance - 0.2) <= 2 * res,
         "hausdorff(B1, B1.2)");
  expect(hausdorff(disc, disc).distance == 0.0, "hausdorff(A, A)");
  const PlanarDomain unit = make_rectangle(0.0, Point(1, 1), res);
  expect(std::abs(hausdorff(unit, unit.transformed(1.0, 0.3)).distance - 0.3) <= 2 * res,
         "hausdorff(square, translate 0.3)");
  expect(compactly_contained(make_disc_polygon(0.0, 0.5, res), disc).contained, "B0.5 in B1");
  expect(!compactly_contained(disc, disc).contained, "B1 not in B1");
  expect(contains_compact(disc, std::vector<Point>{0.0, 0.5}), "contains {0, 0.5}");
  expect(!contains_compact(disc, std::vector<Point>{0.999999}), "excludes 0.999999");

  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> nv(5, 12);
  int bad = 0;
  double worst = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const PlanarDomain a = testing::random_star_polygon(rng, nv(rng), 0.6, 1.4, res);
    const PlanarDomain b = testing::random_star_polygon(rng, nv(rng), 0.6, 1.4, res);
    const PlanarDomain c = testing::random_star_polygon(rng, nv(rng), 0.6, 1.4, res);
    const double excess = hausdorff(a, c).distance - hausdorff(a, b).distance - hausdorff(b, c).distance;
    worst = std::max(worst, excess);
    bad += excess > 4 * res;
  }
  expect(bad == 0, "triangle inequality");
  std::string detail = std::to_string(12 - static_cast<int>(std::count_if(failed.begin(), failed.end(), [&](const std::string& s) {
                         return s != "triangle inequality";
                       }))) +
                       "/12 examples, triangle excess max " + fmt("%.2e", worst) + " over 1000 triples";
  for (const std::string& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace
}  // namespace imlab

int main(int argc, char** argv) {
  using imlab::Outcome;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, imlab::disc_ground_truth},   {2, imlab::ball_certification},   {3, imlab::oracle_consistency},
      {4, imlab::contractibility},     {5, imlab::wobble_convergence},   {6, imlab::sandwich_certificate},
      {7, imlab::green_track},         {8, imlab::geometry_kernel},      {9, imlab::determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all = true;
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && selected.count(id) == 0) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %d: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
