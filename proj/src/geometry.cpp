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

#include "imlab/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#define BOOST_ALLOW_DEPRECATED_HEADERS
#include <boost/geometry.hpp>
#include <Eigen/Dense>

#include "imlab/errors.hpp"
#include "imlab/kernels.hpp"

namespace imlab {
namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({std::abs(b - a), std::abs(c - a), 1e-300});
  if (std::abs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.real(), b.real()) - 1e-15 <= p.real() &&
         p.real() <= std::max(a.real(), b.real()) + 1e-15 &&
         std::min(a.imag(), b.imag()) - 1e-15 <= p.imag() &&
         p.imag() <= std::max(a.imag(), b.imag()) + 1e-15;
}

double signed_area_of(const std::vector<Point>& v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    twice += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * twice;
}

// Returns the index of an offending edge pair, or nothing if simple.
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(
    const std::vector<Point>& v) {
  const std::size_t n = v.size();
  struct Edge {
    double xmin, xmax;
    std::size_t i;
  };
  std::vector<Edge> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    edges[i] = {std::min(a.real(), b.real()), std::max(a.real(), b.real()), i};
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& l, const Edge& r) { return l.xmin < r.xmin; });
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t i = edges[s].i;
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    for (std::size_t t = s + 1; t < n && edges[t].xmin <= edges[s].xmax; ++t) {
      const std::size_t j = edges[t].i;
      const Point c = v[j];
      const Point d = v[(j + 1) % n];
      const bool adjacent = (j == (i + 1) % n) || (i == (j + 1) % n);
      if (adjacent) {
        // Adjacent edges may only share their common vertex; a fold-back
        // overlap is a degeneracy.
        const Point shared = (j == (i + 1) % n) ? b : a;
        const Point p = (shared == b) ? a : b;
        const Point q = (shared == c) ? d : c;
        if (orientation(shared, p, q) == 0 &&
            std::real((p - shared) * std::conj(q - shared)) > 0.0) {
          return std::make_pair(i, j);
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

BgPolygon to_boost(const PlanarDomain& d) {
  BgPolygon poly;
  for (const Point& p : d.vertices()) {
    bg::append(poly.outer(), BgPoint(p.real(), p.imag()));
  }
  bg::append(poly.outer(), BgPoint(d.vertices()[0].real(), d.vertices()[0].imag()));
  return poly;
}

std::vector<Point> ring_to_points(const BgPolygon::ring_type& ring, double scale) {
  std::vector<Point> out;
  out.reserve(ring.size());
  const double tol = 1e-11 * std::max(scale, 1.0);
  for (const auto& q : ring) {
    const Point p(q.x(), q.y());
    if (!out.empty() && std::abs(p - out.back()) <= tol) continue;
    out.push_back(p);
  }
  while (out.size() > 1 && std::abs(out.front() - out.back()) <= tol) out.pop_back();
  // Drop exactly collinear interior points so the polygon stays minimal.
  std::vector<Point> cleaned;
  cleaned.reserve(out.size());
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point prev = out[(i + n - 1) % n];
    const Point next = out[(i + 1) % n];
    const Point e1 = out[i] - prev;
    const Point e2 = next - out[i];
    const double c = cross(e1, e2);
    const double dot = std::real(e1 * std::conj(e2));
    if (std::abs(c) <= 1e-14 * std::abs(e1) * std::abs(e2) && dot > 0.0) continue;
    cleaned.push_back(out[i]);
  }
  if (signed_area_of(cleaned) < 0.0) std::reverse(cleaned.begin(), cleaned.end());
  return cleaned;
}

double scale_of(const PlanarDomain& d) {
  const auto [lo, hi] = d.bounds();
  return std::abs(hi - lo);
}

int points_per_circle(double eps, double resolution) {
  const double n = std::ceil(2.0 * std::numbers::pi * eps / resolution);
  return static_cast<int>(std::clamp(n, 16.0, 20000.0));
}

BgMultiPolygon buffer(const BgPolygon& poly, double distance, int ppc) {
  namespace st = bg::strategy::buffer;
  BgMultiPolygon in;
  in.push_back(poly);
  BgMultiPolygon out;
  bg::buffer(in, out, st::distance_symmetric<double>(distance), st::side_straight(),
             st::join_round(ppc), st::end_round(ppc), st::point_circle(ppc));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Segment primitives

Point closest_point_on_segment(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return a;
  double t = std::real((p - a) * std::conj(ab)) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a + t * ab;
}

double point_segment_distance(Point p, Point a, Point b) {
  return std::abs(p - closest_point_on_segment(p, a, b));
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double segment_segment_distance(Point a, Point b, Point c, Point d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

// ---------------------------------------------------------------------------
// PlanarDomain

PlanarDomain::PlanarDomain(std::vector<Point> vertices, double resolution)
    : vertices_(std::move(vertices)), resolution_(resolution) {
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw GeometryError("polygon resolution must be positive");
  }
  if (vertices_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point p = vertices_[i];
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw GeometryError("polygon vertex is not finite");
    }
    if (p == vertices_[(i + 1) % vertices_.size()]) {
      throw GeometryError("consecutive polygon vertices coincide at index " +
                          std::to_string(i));
    }
  }
  if (signed_area_of(vertices_) <= 0.0) {
    throw GeometryError("polygon must be counterclockwise with positive area");
  }
  if (auto hit = find_self_intersection(vertices_)) {
    throw GeometryError("polygon is not simple: edges " + std::to_string(hit->first) +
                        " and " + std::to_string(hit->second) + " intersect");
  }
}

double PlanarDomain::area() const { return signed_area_of(vertices_); }

double PlanarDomain::perimeter() const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += std::abs(vertex(i + 1) - vertex(i));
  return total;
}

std::pair<Point, Point> PlanarDomain::bounds() const {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const Point& p : vertices_) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    y0 = std::min(y0, p.imag());
    y1 = std::max(y1, p.imag());
  }
  return {Point(x0, y0), Point(x1, y1)};
}

bool PlanarDomain::contains(Point p) const {
  bool inside = false;
  const std::size_t n = size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = vertices_[i];
    const Point b = vertices_[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) /
                                      (b.imag() - a.imag());
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

double PlanarDomain::boundary_distance(Point p) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices_[i];
    const Point b = vertices_[i + 1 == n ? 0 : i + 1];
    const Point ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0.0 ? std::real((p - a) * std::conj(ab)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::norm(p - (a + t * ab)));
  }
  return std::sqrt(best);
}

double PlanarDomain::signed_distance(Point p) const {
  const double d = boundary_distance(p);
  return contains(p) ? d : -d;
}

double PlanarDomain::closure_distance(Point p) const {
  return contains(p) ? 0.0 : boundary_distance(p);
}

Point PlanarDomain::nearest_boundary_point(Point p) const {
  double best = std::numeric_limits<double>::infinity();
  Point arg = vertices_[0];
  for (std::size_t i = 0; i < size(); ++i) {
    const Point q = closest_point_on_segment(p, vertex(i), vertex(i + 1));
    const double d = std::norm(p - q);
    if (d < best) {
      best = d;
      arg = q;
    }
  }
  return arg;
}

std::vector<Point> PlanarDomain::densified_boundary(double spacing) const {
  if (!(spacing > 0.0)) throw GeometryError("sample spacing must be positive");
  std::vector<Point> out;
  for (std::size_t i = 0; i < size(); ++i) {
    const Point a = vertex(i);
    const Point b = vertex(i + 1);
    const auto pieces = static_cast<std::size_t>(
        std::max(1.0, std::ceil(std::abs(b - a) / spacing)));
    for (std::size_t k = 0; k < pieces; ++k) {
      out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
    }
  }
  return out;
}

PlanarDomain PlanarDomain::with_resolution(double resolution) const {
  return PlanarDomain(vertices_, resolution);
}

PlanarDomain PlanarDomain::transformed(Point scale, Point shift) const {
  if (scale == 0.0) throw GeometryError("affine change must be invertible");
  std::vector<Point> out;
  out.reserve(size());
  for (const Point& p : vertices_) out.push_back(scale * p + shift);
  return PlanarDomain(std::move(out), resolution_ * std::abs(scale));
}

std::uint64_t PlanarDomain::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (const Point& p : vertices_) {
    mix(p.real());
    mix(p.imag());
  }
  mix(resolution_);
  return h;
}

PlanarDomain make_disc_polygon(Point center, double radius, double resolution) {
  if (!(radius > 0.0)) throw GeometryError("disc radius must be positive");
  const auto n = static_cast<std::size_t>(
      std::max(16.0, std::ceil(2.0 * std::numbers::pi * radius / resolution)));
  std::vector<Point> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = center + std::polar(radius, 2.0 * std::numbers::pi * k / n);
  }
  return PlanarDomain(std::move(v), resolution);
}

PlanarDomain make_rectangle(Point lower_left, Point upper_right, double resolution) {
  return PlanarDomain({lower_left, Point(upper_right.real(), lower_left.imag()),
                       upper_right, Point(lower_left.real(), upper_right.imag())},
                      resolution);
}

PlanarDomain make_square(double half_side, double resolution) {
  return make_rectangle(Point(-half_side, -half_side), Point(half_side, half_side),
                        resolution);
}

PlanarDomain make_l_shape(double resolution) {
  return PlanarDomain({{-1, -1}, {1, -1}, {1, 0}, {0, 0}, {0, 1}, {-1, 1}}, resolution);
}

// ---------------------------------------------------------------------------
// PolygonIndex

PolygonIndex::PolygonIndex(const PlanarDomain& d) : v_(d.vertices()) {
  const auto [lo, hi] = d.bounds();
  const std::size_t n = v_.size();
  const double width = std::max(hi.real() - lo.real(), 1e-12);
  const double height = std::max(hi.imag() - lo.imag(), 1e-12);
  const double target = std::clamp(2.0 * std::sqrt(static_cast<double>(n)), 4.0, 256.0);
  cell_ = std::max(width, height) / target;
  origin_ = lo - Point(cell_, cell_);
  nx_ = static_cast<int>(std::ceil(width / cell_)) + 2;
  ny_ = static_cast<int>(std::ceil(height / cell_)) + 2;
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v_[i];
    const Point b = v_[(i + 1) % n];
    const int x0 = static_cast<int>((std::min(a.real(), b.real()) - origin_.real()) / cell_);
    const int x1 = static_cast<int>((std::max(a.real(), b.real()) - origin_.real()) / cell_);
    const int y0 = static_cast<int>((std::min(a.imag(), b.imag()) - origin_.imag()) / cell_);
    const int y1 = static_cast<int>((std::max(a.imag(), b.imag()) - origin_.imag()) / cell_);
    for (int x = std::max(x0, 0); x <= std::min(x1, nx_ - 1); ++x) {
      for (int y = std::max(y0, 0); y <= std::min(y1, ny_ - 1); ++y) {
        cells_[static_cast<std::size_t>(y) * nx_ + x].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
}

// Sign of p relative to the boundary when its nearest boundary point lies on
// `edge` at parameter t.
double PolygonIndex::classify(Point p, std::size_t edge, double t) const {
  const std::size_t n = v_.size();
  auto left_of = [&](std::size_t e) {
    const Point a = v_[e];
    const Point b = v_[(e + 1) % n];
    return cross(b - a, p - a) > 0.0;
  };
  if (t > 0.0 && t < 1.0) return left_of(edge) ? 1.0 : -1.0;
  // Nearest feature is a vertex: combine the two incident edges.
  const std::size_t vtx = t <= 0.0 ? edge : (edge + 1) % n;
  const std::size_t e_in = (vtx + n - 1) % n;
  const std::size_t e_out = vtx;
  const Point prev = v_[e_in];
  const Point cur = v_[vtx];
  const Point next = v_[(vtx + 1) % n];
  const bool convex = cross(cur - prev, next - cur) > 0.0;
  const bool inside = convex ? (left_of(e_in) && left_of(e_out)) : (left_of(e_in) || left_of(e_out));
  return inside ? 1.0 : -1.0;
}

PolygonIndex::Query PolygonIndex::brute_force(Point p) const {
  const std::size_t n = v_.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  double arg_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v_[i];
    const Point ab = v_[(i + 1) % n] - a;
    const double len2 = std::norm(ab);
    const double t = len2 > 0.0 ? std::clamp(std::real((p - a) * std::conj(ab)) / len2, 0.0, 1.0) : 0.0;
    const double d2 = std::norm(p - (a + t * ab));
    if (d2 < best) {
      best = d2;
      arg = i;
      arg_t = t;
    }
  }
  const Point nearest = v_[arg] + arg_t * (v_[(arg + 1) % n] - v_[arg]);
  return {classify(p, arg, arg_t) * std::sqrt(best), nearest};
}

PolygonIndex::Query PolygonIndex::query(Point p) const {
  const double fx = (p.real() - origin_.real()) / cell_;
  const double fy = (p.imag() - origin_.imag()) / cell_;
  if (!(fx >= 0.0 && fy >= 0.0 && fx < nx_ && fy < ny_)) return brute_force(p);
  const int cx = static_cast<int>(fx);
  const int cy = static_cast<int>(fy);
  const std::size_t n = v_.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  double arg_t = 0.0;
  auto visit = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= nx_ || y >= ny_) return;
    for (std::uint32_t i : cells_[static_cast<std::size_t>(y) * nx_ + x]) {
      const Point a = v_[i];
      const Point ab = v_[(i + 1) % n] - a;
      const double len2 = std::norm(ab);
      const double t = len2 > 0.0 ? std::clamp(std::real((p - a) * std::conj(ab)) / len2, 0.0, 1.0) : 0.0;
      const double d2 = std::norm(p - (a + t * ab));
      if (d2 < best || (d2 == best && i < arg)) {
        best = d2;
        arg = i;
        arg_t = t;
      }
    }
  };
  const int max_ring = std::max(nx_, ny_);
  for (int r = 0; r <= max_ring; ++r) {
    if (r == 0) {
      visit(cx, cy);
    } else {
      for (int x = cx - r; x <= cx + r; ++x) {
        visit(x, cy - r);
        visit(x, cy + r);
      }
      for (int y = cy - r + 1; y <= cy + r - 1; ++y) {
        visit(cx - r, y);
        visit(cx + r, y);
      }
    }
    // Cells outside ring r are at least r * cell_ away from p.
    if (best < std::numeric_limits<double>::infinity() && std::sqrt(best) <= r * cell_) break;
  }
  if (!(best < std::numeric_limits<double>::infinity())) return brute_force(p);
  const Point nearest = v_[arg] + arg_t * (v_[(arg + 1) % n] - v_[arg]);
  return {classify(p, arg, arg_t) * std::sqrt(best), nearest};
}

double PolygonIndex::segment_clearance(Point a, Point b) const {
  const double da = std::abs(query(a).signed_distance);
  const double db = std::abs(query(b).signed_distance);
  double best = std::min(da, db);
  if (best == 0.0) return 0.0;
  // Any edge closer than `best` to the segment meets this expanded box.
  const double x0 = std::min(a.real(), b.real()) - best;
  const double x1 = std::max(a.real(), b.real()) + best;
  const double y0 = std::min(a.imag(), b.imag()) - best;
  const double y1 = std::max(a.imag(), b.imag()) + best;
  const int cx0 = std::max(0, static_cast<int>(std::floor((x0 - origin_.real()) / cell_)));
  const int cx1 = std::min(nx_ - 1, static_cast<int>(std::floor((x1 - origin_.real()) / cell_)));
  const int cy0 = std::max(0, static_cast<int>(std::floor((y0 - origin_.imag()) / cell_)));
  const int cy1 = std::min(ny_ - 1, static_cast<int>(std::floor((y1 - origin_.imag()) / cell_)));
  const std::size_t n = v_.size();
  const bool covered = x0 >= origin_.real() && y0 >= origin_.imag() &&
                       x1 < origin_.real() + nx_ * cell_ && y1 < origin_.imag() + ny_ * cell_;
  if (!covered) {
    for (std::size_t i = 0; i < n; ++i) {
      best = std::min(best, segment_segment_distance(a, b, v_[i], v_[(i + 1) % n]));
    }
    return best;
  }
  for (int x = cx0; x <= cx1; ++x) {
    for (int y = cy0; y <= cy1; ++y) {
      for (std::uint32_t i : cells_[static_cast<std::size_t>(y) * nx_ + x]) {
        best = std::min(best, segment_segment_distance(a, b, v_[i], v_[(i + 1) % n]));
        if (best == 0.0) return 0.0;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// ModelDomain

ModelDomain::ModelDomain(Kind kind, PointN center, std::vector<double> radii)
    : kind_(kind), center_(std::move(center)), radii_(std::move(radii)) {
  const std::size_t n = center_.size();
  if (n == 0) throw GeometryError("model domain needs dimension >= 1");
  if (radii_.size() != n) throw GeometryError("model domain radii/center size mismatch");
  for (double r : radii_) {
    if (!(r > 0.0)) throw GeometryError("model domain radii must be positive");
  }
  matrix_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) matrix_[i * n + i] = 1.0;
  translation_.assign(n, 0.0);
  rebuild_inverse();
}

ModelDomain ModelDomain::disc(Point center, double radius) {
  return ModelDomain(Kind::kDisc, {center}, {radius});
}

ModelDomain ModelDomain::ball(std::size_t dim, PointN center, double radius) {
  if (center.empty()) center.assign(dim, 0.0);
  if (center.size() != dim) throw GeometryError("ball center has wrong dimension");
  return ModelDomain(Kind::kBall, std::move(center), std::vector<double>(dim, radius));
}

ModelDomain ModelDomain::polydisc(PointN center, std::vector<double> radii) {
  return ModelDomain(Kind::kPolydisc, std::move(center), std::move(radii));
}

ModelDomain ModelDomain::affine_image(std::vector<std::complex<double>> matrix,
                                      PointN translation) const {
  const std::size_t n = dim();
  if (matrix.size() != n * n || translation.size() != n) {
    throw GeometryError("affine map has wrong dimension");
  }
  ModelDomain out = *this;
  // New map z' = B (A u + t) + s.
  std::vector<std::complex<double>> a(n * n, 0.0);
  PointN t(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = translation[i];
    for (std::size_t k = 0; k < n; ++k) {
      t[i] += matrix[i * n + k] * translation_[k];
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] += matrix[i * n + k] * matrix_[k * n + j];
    }
  }
  out.matrix_ = std::move(a);
  out.translation_ = std::move(t);
  out.rebuild_inverse();
  return out;
}

void ModelDomain::rebuild_inverse() {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = matrix_[i * n + j];
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    throw GeometryError("affine map must be invertible");
  }
  const Eigen::MatrixXcd inv = lu.inverse();
  to_unit_.assign(dim() * dim(), 0.0);
  offset_.assign(dim(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::complex<double> shift = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      to_unit_[i * n + j] = inv(i, j) / radii_[i];
      shift += inv(i, j) * translation_[j];
    }
    offset_[i] = -(shift + center_[i]) / radii_[i];
  }
}

PointN ModelDomain::normalized(const PointN& z) const {
  const std::size_t n = dim();
  if (z.size() != n) throw DomainError("point has wrong dimension for model domain");
  PointN v(offset_);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) v[i] += to_unit_[i * n + j] * z[j];
  }
  return v;
}

PointN ModelDomain::denormalized(const PointN& v) const {
  const std::size_t n = dim();
  PointN z(translation_);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      z[i] += matrix_[i * n + j] * (v[j] * radii_[j] + center_[j]);
    }
  }
  return z;
}

double ModelDomain::normalized_margin(const PointN& z) const {
  const PointN v = normalized(z);
  if (kind_ == Kind::kPolydisc) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return 1.0 - m;
  }
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return 1.0 - std::sqrt(s);
}

double ModelDomain::linear_form_sup(const PointN& a) const {
  if (a.size() != dim()) throw DomainError("linear form has wrong dimension");
  double s = 0.0;
  if (kind_ == Kind::kPolydisc) {
    for (const auto& x : a) s += std::abs(x);
    return s;
  }
  for (const auto& x : a) s += std::norm(x);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Offsets and unions

PlanarDomain envelope(const PlanarDomain& s, double eps) {
  if (!(eps > 0.0)) throw GeometryError("envelope radius must be positive");
  const BgMultiPolygon out = buffer(to_boost(s), eps, points_per_circle(eps, s.resolution()));
  if (out.size() != 1) throw GeometryError("envelope is not a single polygon");
  if (!out[0].inners().empty()) {
    throw GeometryError("envelope has holes; not representable as a simple polygon");
  }
  return PlanarDomain(ring_to_points(out[0].outer(), scale_of(s) + eps), s.resolution());
}

ErosionResult erode(const PlanarDomain& d, double eps) {
  if (!(eps > 0.0)) throw GeometryError("erosion depth must be positive");
  BgMultiPolygon out = buffer(to_boost(d), -eps, points_per_circle(eps, d.resolution()));
  // Slivers below the boundary resolution are offset noise, not components.
  const double min_area = d.resolution() * d.resolution() * 1e-3;
  std::erase_if(out, [&](const BgPolygon& p) { return std::abs(bg::area(p)) <= min_area; });
  ErosionResult result;
  result.components = static_cast<int>(out.size());
  if (out.empty()) {
    result.status = ErosionResult::Status::kEmpty;
    return result;
  }
  std::size_t largest = 0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (std::abs(bg::area(out[i])) > std::abs(bg::area(out[largest]))) largest = i;
  }
  result.largest_component =
      PlanarDomain(ring_to_points(out[largest].outer(), scale_of(d)), d.resolution());
  if (out.size() == 1) {
    result.status = ErosionResult::Status::kConnected;
    result.domain = result.largest_component;
  } else {
    result.status = ErosionResult::Status::kDisconnected;
  }
  return result;
}

PlanarDomain polygon_union(std::span<const PlanarDomain> parts) {
  if (parts.empty()) throw GeometryError("union of no polygons");
  BgMultiPolygon acc;
  acc.push_back(to_boost(parts[0]));
  double res = parts[0].resolution();
  double scale = scale_of(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    BgMultiPolygon next;
    bg::union_(acc, to_boost(parts[i]), next);
    acc = std::move(next);
    res = std::min(res, parts[i].resolution());
    scale = std::max(scale, scale_of(parts[i]));
  }
  if (acc.size() != 1) throw GeometryError("polygon union is disconnected");
  return PlanarDomain(ring_to_points(acc[0].outer(), scale), res);
}

// ---------------------------------------------------------------------------
// Hausdorff distance and containment

double directed_hausdorff(const PlanarDomain& a, const PlanarDomain& b, double spacing,
                          std::pair<Point, Point>* witness) {
  const std::vector<Point> samples = a.densified_boundary(spacing);
  const kernels::Extremum e = kernels::max_closure_distance(samples, b);
  if (witness != nullptr) {
    const Point p = samples[e.index];
    *witness = {p, b.contains(p) ? p : b.nearest_boundary_point(p)};
  }
  return e.value;
}

HausdorffResult hausdorff(const PlanarDomain& a, const PlanarDomain& b,
                          std::optional<double> spacing) {
  const double h = spacing.value_or(std::max(a.resolution(), b.resolution()));
  HausdorffResult r;
  r.directed_a_to_b = directed_hausdorff(a, b, h, &r.witness_a_to_b);
  r.directed_b_to_a = directed_hausdorff(b, a, h, &r.witness_b_to_a);
  r.distance = std::max(r.directed_a_to_b, r.directed_b_to_a);
  r.error_bound = 0.5 * h;
  return r;
}

ContainmentResult compactly_contained(const PlanarDomain& a, const PlanarDomain& b,
                                      std::optional<double> resolution) {
  const double res = resolution.value_or(std::max(a.resolution(), b.resolution()));
  const std::vector<Point> samples = a.densified_boundary(res);
  const kernels::Extremum e = kernels::min_signed_distance(samples, b);
  ContainmentResult r;
  r.margin = e.value;
  r.witness = samples[e.index];
  r.contained = r.margin > 2.0 * res;
  return r;
}

bool contains_compact(const PlanarDomain& d, std::span<const Point> k,
                      std::optional<double> resolution) {
  if (k.empty()) throw GeometryError("compact test set must be nonempty");
  const double res = resolution.value_or(d.resolution());
  return std::all_of(k.begin(), k.end(),
                     [&](Point p) { return d.signed_distance(p) > 2.0 * res; });
}

}  // namespace imlab
