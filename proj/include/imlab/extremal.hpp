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

// Certified one-sided solvers for the Caratheodory, Lempert, Kobayashi and
// Green systems. Every returned bound is backed by an explicit candidate
// whose feasibility has been verified with a rigorous sampling argument:
//
//   * Caratheodory: a polynomial f (planar domains: plus simple poles outside
//     the closure) and a proven upper bound M on sup_D |f|; then
//     c_D(z,w) >= p(f(z)/M, f(w)/M).
//   * Lempert: a disc phi (polynomial plus poles outside the closed unit
//     disc) with phi(0) = z, phi(r) = w and phi(closed disc) inside D; then
//     l_D(z,w) <= p(0, r).
//   * Kobayashi: a chain of Lempert discs through finitely many waypoints.
//   * Green: c* <= g <= l* after tanh.

#ifndef IMLAB_EXTREMAL_HPP
#define IMLAB_EXTREMAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "imlab/estimate.hpp"
#include "imlab/geometry.hpp"

namespace imlab {

using Domain = std::variant<PlanarDomain, ModelDomain>;

std::size_t domain_dim(const Domain& d);
// Margin of a point: boundary distance (planar) or normalized margin
// (model). Positive iff inside.
double domain_margin(const Domain& d, const PointN& z);
// Scale used for solver tolerances (planar: resolution; model: 1e-9).
double domain_resolution(const Domain& d);

// phi(zeta) = sum_j coefficients[j] zeta^j + sum_k residues[k] / (zeta - poles[k]),
// with every pole outside the closed unit disc.
struct AnalyticDiscCandidate {
  std::vector<PointN> coefficients;
  std::vector<Point> poles;
  std::vector<PointN> residues;
  double lambda = 1.0;  // phi(lambda) = w, lambda in (0, 1)
  double interpolation_error = 0.0;
  // Smallest verified margin (positive means feasible) over the boundary
  // circle, after subtracting the chord-deviation bound.
  double certified_margin = 0.0;
  // Smallest raw margin over an interior grid of the unit disc.
  double interior_margin = 0.0;
  bool feasible = false;
};

// Planar: f(x) = sum_j coefficients[j] u^j + sum_k residues[k] / (x - poles[k])
// with u = (x - origin) / scale, the constant chosen so that f(origin) = 0 up
// to rounding. Model domains: f(x) = a . v(x) in normalized coordinates.
struct DiscMapCandidate {
  std::vector<Point> coefficients;
  Point origin;
  double scale = 1.0;
  std::vector<Point> poles;  // outside the closed polygon
  std::vector<Point> residues;
  PointN linear_form;  // model domains only
  // Proven bound on sup_D |f| and the raw sampled maximum.
  double sup_bound = 0.0;
  double sampled_sup = 0.0;
};

struct CaratheodoryOptions {
  int degree = 8;
  // Poles clustered toward each reflex corner (0: polynomials only).
  int poles_per_corner = 12;
  int lawson_iterations = 300;
  // Boundary sample spacing for the optimization (0: domain resolution).
  double sample_spacing = 0.0;
  // Number of samples used for the rigorous sup bound.
  int certify_samples = 1 << 16;
  int random_starts = 6;
  std::uint64_t seed = 1;
  // Candidate from an earlier (lower degree) solve; never done worse than.
  std::optional<DiscMapCandidate> warm_start;
};

struct LempertOptions {
  int degree = 8;
  // Circle samples for the optimizer and for the rigorous chord check.
  int optimize_samples = 0;  // 0: max(96, 16 * degree)
  int verify_samples = 2048;
  int max_inner_iterations = 120;
  int bisection_steps = 28;
  // Raw margin the optimizer aims for before a rigorous check is attempted:
  // a fraction of the resolution (planar) or an absolute value (model).
  double target_margin = 0.02;
  double model_target_margin = 1e-7;
  // Poles clustered outside the circle at the preimages of sharp corners
  // (planar domains); 0 keeps the disc polynomial.
  int poles_per_corner = 8;
  std::uint64_t seed = 1;
  std::optional<AnalyticDiscCandidate> warm_start;
};

struct CaratheodoryResult {
  MetricEstimate estimate;  // lower side only
  DiscMapCandidate candidate;
};

struct LempertResult {
  MetricEstimate estimate;  // upper side only; +inf when nothing was found
  std::optional<AnalyticDiscCandidate> candidate;
};

CaratheodoryResult caratheodory_lower(const Domain& d, const PointN& z, const PointN& w,
                                      const CaratheodoryOptions& options = {});
LempertResult lempert_upper(const Domain& d, const PointN& z, const PointN& w,
                            const LempertOptions& options = {});

struct KobayashiResult {
  MetricEstimate estimate;           // upper side
  std::vector<std::size_t> path;     // indices into the waypoint list
  std::vector<double> edge_weights;  // row-major |W| x |W|, +inf if missing
};

// Shortest z -> w path over the complete graph on `waypoints` with Lempert
// upper bounds as edge weights. `waypoints` must contain z and w.
KobayashiResult kobayashi_upper(const Domain& d, const PointN& z, const PointN& w,
                                const std::vector<PointN>& waypoints,
                                const LempertOptions& options = {});

struct SolverConfig {
  CaratheodoryOptions caratheodory;
  LempertOptions lempert;
  // Extra Kobayashi waypoints besides z and w: this many interior points
  // placed on the segment [z, w] (convex combinations).
  int segment_waypoints = 1;
  double certify_tolerance = 1e-2;
  // Attach the conformal value to planar Green estimates.
  bool green_conformal = true;
};

// Star-valued [tanh c_lower, tanh l_upper] for g_D(z, w); on planar domains
// `exact` carries |psi_z(w)| from the conformal map.
MetricEstimate green_bounds(const Domain& d, const PointN& z, const PointN& w,
                            const SolverConfig& config = {}, bool with_conformal = true);

// Certified interval for any system from the extremal solvers.
MetricEstimate estimate_system(const Domain& d, const PointN& z, const PointN& w,
                               System system, const SolverConfig& config = {});

// Rigorous feasibility check of a disc candidate (used by the solver and by
// independent re-verification in tests).
// Uses the coefficients, poles, residues and lambda of `disc`.
AnalyticDiscCandidate verify_disc(const Domain& d, AnalyticDiscCandidate disc, const PointN& w,
                                  int verify_samples);

PointN evaluate_disc(const AnalyticDiscCandidate& disc, Point zeta);

// Value of a planar candidate.
Point evaluate_candidate(const DiscMapCandidate& f, Point x);

// Proven bound on sup over the polygon of |f| for a planar candidate, from
// `samples` boundary samples refined adaptively near the poles.
double candidate_sup_bound(const PlanarDomain& d, const DiscMapCandidate& f, int samples,
                           double* sampled_max);

// Same for a polynomial without poles.
double polynomial_sup_bound(const PlanarDomain& d, const std::vector<Point>& coefficients,
                            Point origin, double scale, int samples, double* sampled_max);

}  // namespace imlab

#endif  // IMLAB_EXTREMAL_HPP
