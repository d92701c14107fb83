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

// Numerical Riemann map of a polygonal domain onto the unit disc.
//
// The map psi with psi(z0) = 0, psi'(z0) > 0 is written as
//   psi(z) = (z - z0) exp(g(z) + i h(z)),
// where g is harmonic with g = -log|z - z0| on the boundary. g is a
// single-layer potential
//   g(z) = int_Gamma log|z - zeta| sigma(zeta) ds - gamma,
// whose density solves the first-kind (Symm) equation on the boundary with
// the side condition int sigma = -1. The density is piecewise constant on
// straight panels graded towards corners, collocated at panel midpoints,
// and the panel integrals of the log kernel are evaluated in closed form.
// On the boundary |psi'| = -2 pi sigma, which integrates to the boundary
// correspondence theta(s); interior values come from a barycentric Cauchy
// integral of exp(i theta).

#ifndef IMLAB_CONFORMAL_HPP
#define IMLAB_CONFORMAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "imlab/estimate.hpp"
#include "imlab/geometry.hpp"

namespace imlab {

struct ConformalOptions {
  // Target panel length before corner grading; 0 picks perimeter / 320.
  double panel_length = 0.0;
  // Dyadic refinement levels applied to panels touching a corner.
  int corner_levels = 8;
  // Vertices turning by more than this (degrees) count as corners.
  double corner_threshold_deg = 12.0;
  // Interior angles below this (degrees) are rejected as ill-conditioned.
  double min_angle_deg = 5.0;
  // Gauss-Legendre nodes per panel in the Cauchy evaluator.
  int gauss_nodes = 8;
  // Solve again with halved panels and report the change as accuracy.
  bool estimate_accuracy = true;
};

struct BoundaryPanel {
  Point start;
  Point end;
  double sigma = 0.0;        // single-layer density on the panel
  double theta_start = 0.0;  // boundary correspondence at `start` (unnormalized)
  double theta_end = 0.0;
};

class RiemannMap {
 public:
  // Throws DomainError if z0 is not interior with margin 2 * resolution and
  // ConditioningError for corners sharper than options.min_angle_deg.
  static RiemannMap build(const PlanarDomain& domain, Point z0,
                          const ConformalOptions& options = {});

  // psi(z). Throws DomainError outside the domain.
  Point operator()(Point z) const;
  // |psi(z)| from the single-layer potential alone (no harmonic conjugate).
  double modulus(Point z) const;
  // psi'(z0) > 0.
  double derivative_at_basepoint() const { return derivative_at_basepoint_; }

  const PlanarDomain& domain() const { return domain_; }
  Point basepoint() const { return basepoint_; }
  double accuracy() const { return accuracy_; }
  // Additive constant of the discrete system; analytically zero.
  double log_constant() const { return gamma_; }
  const std::vector<BoundaryPanel>& panels() const { return panels_; }
  // (boundary point, image on the unit circle) at every panel start.
  std::vector<std::pair<Point, Point>> boundary_correspondence() const;

  // Cache format: boundary table plus metadata keyed by polygon hash and
  // resolution.
  std::string to_json() const;
  static RiemannMap from_json(const std::string& text, const PlanarDomain& domain);

 private:
  RiemannMap(PlanarDomain domain, Point basepoint);
  Point cauchy(Point z) const;

  PlanarDomain domain_;
  Point basepoint_;
  std::vector<BoundaryPanel> panels_;
  double gamma_ = 0.0;
  double theta0_ = 0.0;
  double derivative_at_basepoint_ = 0.0;
  double accuracy_ = 0.0;
  int gauss_nodes_ = 8;
};

// c/k/l: p(psi(z), psi(w)); g: m(psi(z), psi(w)). The interval is widened
// by 5 * accuracy propagated through the metric.
MetricEstimate pullback_metric(const RiemannMap& map, Point z, Point w, System system);

// Green function value g_D(z, w) = |psi_z(w)| using a map based at z. This
// route needs only the single-layer modulus, so it is independent of the
// Cauchy evaluator.
double green_star_exact(const PlanarDomain& domain, Point z, Point w,
                        const ConformalOptions& options = {});

// Closed-form integral of log|x - zeta| over the straight panel [a, b].
double panel_log_integral(Point x, Point a, Point b);

}  // namespace imlab

#endif  // IMLAB_CONFORMAL_HPP
