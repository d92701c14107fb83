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

// Compact-set calculus on planar polygonal domains and exact model domains
// in C^n: dilations (envelopes), erosions, Hausdorff distance between
// closures and conservative compact-containment tests.

#ifndef IMLAB_GEOMETRY_HPP
#define IMLAB_GEOMETRY_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace imlab {

using Point = std::complex<double>;
using PointN = std::vector<std::complex<double>>;

inline constexpr double kDefaultResolution = 1e-2;

// Bounded planar domain: the interior of a simple, counterclockwise polygon.
// The loop is implicitly closed. `resolution` is the target boundary sample
// spacing used by every discretized operation on this domain.
class PlanarDomain {
 public:
  // Throws GeometryError unless the polygon is simple with positive area.
  explicit PlanarDomain(std::vector<Point> vertices,
                        double resolution = kDefaultResolution);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double resolution() const { return resolution_; }

  Point vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

  double area() const;
  double perimeter() const;
  // Axis-aligned bounding box as (lower-left, upper-right).
  std::pair<Point, Point> bounds() const;

  // Open-polygon membership (crossing number). Boundary points may land on
  // either side; callers needing robustness combine with boundary_distance.
  bool contains(Point p) const;
  // Euclidean distance from p to the polygon boundary.
  double boundary_distance(Point p) const;
  // Positive inside, negative outside.
  double signed_distance(Point p) const;
  // Distance from p to the closed polygon (zero for interior points).
  double closure_distance(Point p) const;
  Point nearest_boundary_point(Point p) const;

  // Boundary samples: all vertices plus interior edge points at spacing at
  // most `spacing`, in boundary order.
  std::vector<Point> densified_boundary(double spacing) const;
  std::vector<Point> densified_boundary() const {
    return densified_boundary(resolution_);
  }

  PlanarDomain with_resolution(double resolution) const;
  PlanarDomain transformed(Point scale, Point shift) const;

  // Stable 64-bit content hash (FNV-1a over vertex bits and resolution).
  std::uint64_t content_hash() const;

 private:
  std::vector<Point> vertices_;
  double resolution_;
};

// Factories for the test and experiment domains.
PlanarDomain make_disc_polygon(Point center, double radius,
                               double resolution = kDefaultResolution);
PlanarDomain make_rectangle(Point lower_left, Point upper_right,
                            double resolution = kDefaultResolution);
PlanarDomain make_square(double half_side = 1.0,
                         double resolution = kDefaultResolution);
// [-1,1]^2 with the quadrant [0,1]^2 removed.
PlanarDomain make_l_shape(double resolution = kDefaultResolution);

// Exact-geometry domain in C^n: an invertible affine image
//   z = A u + t
// of a standard disc, ball or polydisc {u : |(u_j - c_j) / r_j| ...}.
class ModelDomain {
 public:
  enum class Kind { kDisc, kBall, kPolydisc };

  static ModelDomain disc(Point center = 0.0, double radius = 1.0);
  static ModelDomain ball(std::size_t dim, PointN center = {},
                          double radius = 1.0);
  static ModelDomain polydisc(PointN center, std::vector<double> radii);

  // Composes the domain with z -> A z + t (A row-major, dim x dim).
  ModelDomain affine_image(std::vector<std::complex<double>> matrix,
                           PointN translation) const;

  Kind kind() const { return kind_; }
  std::size_t dim() const { return center_.size(); }
  const PointN& center() const { return center_; }
  const std::vector<double>& radii() const { return radii_; }

  // Coordinates in which the domain is the unit ball / unit polydisc.
  PointN normalized(const PointN& z) const;
  // Inverse of normalized().
  PointN denormalized(const PointN& v) const;
  // Linear part of normalized(), row-major.
  const std::vector<std::complex<double>>& normalizing_matrix() const {
    return to_unit_;
  }

  // Distance of the normalized point to the complement of the unit model:
  // 1 - |v| (ball) or 1 - max |v_j| (polydisc). Positive iff inside.
  double normalized_margin(const PointN& z) const;
  bool contains(const PointN& z) const { return normalized_margin(z) > 0.0; }
  // Exact sup over the domain of |a . v(z)| for a linear form in normalized
  // coordinates (the form has no constant term).
  double linear_form_sup(const PointN& a) const;

 private:
  ModelDomain(Kind kind, PointN center, std::vector<double> radii);
  void rebuild_inverse();

  Kind kind_;
  PointN center_;
  std::vector<double> radii_;
  // z = A u + t; the normalized coordinate is v = ((A^-1 (z - t)) - c) / r.
  std::vector<std::complex<double>> matrix_;
  PointN translation_;
  std::vector<std::complex<double>> to_unit_;  // v = to_unit_ * z + offset_
  PointN offset_;
};

// Uniform-grid edge index for fast distance queries against one polygon.
// Results agree with the brute-force PlanarDomain queries up to rounding.
class PolygonIndex {
 public:
  explicit PolygonIndex(const PlanarDomain& d);

  struct Query {
    double signed_distance = 0.0;  // positive inside
    Point nearest;                 // closest boundary point
  };
  Query query(Point p) const;
  double signed_distance(Point p) const { return query(p).signed_distance; }
  // Distance from the closed segment [a, b] to the boundary; zero when the
  // segment touches or crosses it.
  double segment_clearance(Point a, Point b) const;

 private:
  Query brute_force(Point p) const;
  double classify(Point p, std::size_t edge, double t) const;

  std::vector<Point> v_;
  Point origin_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;
};

struct HausdorffResult {
  double distance = 0.0;
  double directed_a_to_b = 0.0;
  double directed_b_to_a = 0.0;
  // (sample on closure(A), nearest point of closure(B)) and the reverse.
  std::pair<Point, Point> witness_a_to_b;
  std::pair<Point, Point> witness_b_to_a;
  // Discretization error bound on `distance` (half the sample spacing).
  double error_bound = 0.0;
};

struct ContainmentResult {
  bool contained = false;
  // Min distance of the sampled boundary of A to the boundary of B; negative
  // when some sample lies outside B.
  double margin = 0.0;
  Point witness;  // sample attaining the margin
};

struct ErosionResult {
  enum class Status { kConnected, kEmpty, kDisconnected };
  Status status = Status::kEmpty;
  int components = 0;
  // Present iff status == kConnected.
  std::optional<PlanarDomain> domain;
  // Largest component whenever the erosion is nonempty.
  std::optional<PlanarDomain> largest_component;
};

// Polygonal approximation of the eps-dilation of closure(S), with round
// joins sampled so that arc chords are at most S.resolution().
PlanarDomain envelope(const PlanarDomain& s, double eps);

// Inward offset {z in D : dist(z, boundary D) > eps}.
ErosionResult erode(const PlanarDomain& d, double eps);

// Union of polygons sharing a common interior point; holes are filled.
PlanarDomain polygon_union(std::span<const PlanarDomain> parts);

// Directed distance sup_{a in closure(A)} dist(a, closure(B)) by boundary
// densification of A at `spacing`.
double directed_hausdorff(const PlanarDomain& a, const PlanarDomain& b,
                          double spacing, std::pair<Point, Point>* witness);

// Hausdorff distance between the closures at max(A.res, B.res) unless an
// explicit spacing is given.
HausdorffResult hausdorff(const PlanarDomain& a, const PlanarDomain& b,
                          std::optional<double> spacing = std::nullopt);

// closure(A) inside B with margin above 2 * resolution.
ContainmentResult compactly_contained(
    const PlanarDomain& a, const PlanarDomain& b,
    std::optional<double> resolution = std::nullopt);

// Every point of K lies in D at distance above 2 * resolution from the
// boundary.
bool contains_compact(const PlanarDomain& d, std::span<const Point> k,
                      std::optional<double> resolution = std::nullopt);

double point_segment_distance(Point p, Point a, Point b);
Point closest_point_on_segment(Point p, Point a, Point b);
bool segments_intersect(Point a, Point b, Point c, Point d);
double segment_segment_distance(Point a, Point b, Point c, Point d);

}  // namespace imlab

#endif  // IMLAB_GEOMETRY_HPP
