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

#include "imlab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "imlab/conformal.hpp"
#include "imlab/disc_metrics.hpp"
#include "imlab/errors.hpp"
#include "imlab/kernels.hpp"
#include "optimize.hpp"

namespace imlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

const PlanarDomain* as_planar(const Domain& d) { return std::get_if<PlanarDomain>(&d); }

void check_points(const Domain& d, const PointN& z, const PointN& w) {
  const std::size_t n = domain_dim(d);
  if (z.size() != n || w.size() != n) {
    throw DomainError("point dimension does not match the domain");
  }
  const double need = as_planar(d) ? domain_resolution(d) : 1e-9;
  if (!(domain_margin(d, z) > need) || !(domain_margin(d, w) > need)) {
    throw DomainError("points must lie inside the domain with margin");
  }
}

double norm2(const PointN& v) {
  double s = 0.0;
  for (const Point& x : v) s += std::norm(x);
  return std::sqrt(s);
}

PointN sub(const PointN& a, const PointN& b) {
  PointN out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Point horner(const std::vector<Point>& c, Point u) {
  Point acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

// Artanh of a ratio known to be < 1, nudged down so that rounding cannot
// push a lower bound above the true value.
double safe_lower_artanh(double ratio) {
  ratio = std::clamp(ratio, 0.0, 1.0);
  const double v = std::atanh(std::min(ratio, 1.0 - 1e-16));
  return std::max(0.0, v - 4e-15 * (1.0 + v));
}

double safe_upper_artanh(double r) {
  const double v = std::atanh(r);
  return v + 4e-15 * (1.0 + v);
}

// --- Caratheodory -----------------------------------------------------------

// Lawson's iteratively reweighted least squares for the complex Chebyshev
// problem min_a max_i |t_i + (C a)_i|.
Eigen::VectorXcd lawson(const Eigen::MatrixXcd& C, const Eigen::VectorXcd& t, int iterations,
                        double* best_max) {
  const Eigen::Index m = C.rows();
  Eigen::VectorXd weight = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXcd best = Eigen::VectorXcd::Zero(C.cols());
  *best_max = t.cwiseAbs().maxCoeff();
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd sw = weight.cwiseSqrt();
    const Eigen::MatrixXcd wc = sw.asDiagonal() * C;
    const Eigen::VectorXcd wt = -(sw.asDiagonal() * t);
    const Eigen::VectorXcd a = wc.colPivHouseholderQr().solve(wt);
    const Eigen::VectorXd res = (t + C * a).cwiseAbs();
    const double mx = res.maxCoeff();
    if (mx < *best_max) {
      *best_max = mx;
      best = a;
    }
    // The weighted L2 residual bounds the minimax value from below.
    const double l2 = std::sqrt((weight.array() * res.array().square()).sum());
    if (*best_max - l2 <= 1e-7 * *best_max) break;
    weight = weight.cwiseProduct(res);
    const double total = weight.sum();
    if (!(total > 0.0)) break;
    weight /= total;
  }
  return best;
}

// Polynomial basis orthonormalized on sample points (Vandermonde with
// Arnoldi), in the variable u = (x - origin) / scale.
struct ArnoldiBasis {
  int degree = 0;
  Eigen::MatrixXcd H;  // (degree + 1) x degree

  static ArnoldiBasis build(const std::vector<Point>& u, int degree, Eigen::MatrixXcd* Q) {
    ArnoldiBasis b;
    b.degree = degree;
    const auto m = static_cast<Eigen::Index>(u.size());
    const double dm = static_cast<double>(m);
    b.H = Eigen::MatrixXcd::Zero(degree + 1, degree);
    Q->resize(m, degree + 1);
    Q->col(0).setOnes();
    for (int k = 1; k <= degree; ++k) {
      Eigen::VectorXcd v(m);
      for (Eigen::Index i = 0; i < m; ++i) v(i) = u[static_cast<std::size_t>(i)] * (*Q)(i, k - 1);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < k; ++i) {
          const Point h = Q->col(i).dot(v) / dm;
          b.H(i, k - 1) += h;
          v -= h * Q->col(i);
        }
      }
      const double nrm = v.norm() / std::sqrt(dm);
      b.H(k, k - 1) = nrm;
      Q->col(k) = v / nrm;
    }
    return b;
  }

  std::vector<Point> eval(Point u) const {
    std::vector<Point> q(static_cast<std::size_t>(degree) + 1);
    q[0] = 1.0;
    for (int k = 1; k <= degree; ++k) {
      Point v = u * q[static_cast<std::size_t>(k - 1)];
      for (int i = 0; i < k; ++i) v -= H(i, k - 1) * q[static_cast<std::size_t>(i)];
      q[static_cast<std::size_t>(k)] = v / H(k, k - 1);
    }
    return q;
  }

  // Monomial coefficients of sum_k alpha[k] q_k(u).
  std::vector<Point> monomial(const std::vector<Point>& alpha) const {
    std::vector<std::vector<Point>> q(static_cast<std::size_t>(degree) + 1);
    q[0] = {1.0};
    for (int k = 1; k <= degree; ++k) {
      std::vector<Point> v(static_cast<std::size_t>(k) + 1, 0.0);
      for (std::size_t j = 0; j < q[static_cast<std::size_t>(k - 1)].size(); ++j) {
        v[j + 1] += q[static_cast<std::size_t>(k - 1)][j];
      }
      for (int i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < q[static_cast<std::size_t>(i)].size(); ++j) {
          v[j] -= H(i, k - 1) * q[static_cast<std::size_t>(i)][j];
        }
      }
      for (Point& x : v) x /= H(k, k - 1);
      q[static_cast<std::size_t>(k)] = std::move(v);
    }
    std::vector<Point> out(static_cast<std::size_t>(degree) + 1, 0.0);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      for (std::size_t j = 0; j < q[k].size(); ++j) out[j] += alpha[k] * q[k][j];
    }
    return out;
  }
};

struct Corner {
  Point vertex;
  Point in_dir;   // unit direction of the boundary entering the corner
  Point out_dir;  // and leaving it
  double turn = 0.0;   // total turning, positive for convex corners
  double local = 0.0;  // half the boundary distance to the nearest other corner
};

// Corners as windows of boundary arc length 8 * resolution whose total
// turning exceeds `min_turn`, so that the rounded joins of offset polygons
// count as single corners.
std::vector<Corner> find_corners(const PlanarDomain& d, double min_turn) {
  const std::size_t n = d.size();
  const double half = 4.0 * d.resolution();
  const double perimeter = d.perimeter();
  std::vector<double> turn(n), arc(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point in = d.vertex(i) - d.vertex(i + n - 1);
    const Point out = d.vertex(i + 1) - d.vertex(i);
    turn[i] = std::arg(out / in);
    arc[i + 1] = arc[i] + std::abs(out);
  }
  // Window [first, last] around each vertex, cyclic, by two pointers.
  auto ahead = [&](std::size_t i, std::size_t j) {
    const double s = arc[j % n] - arc[i] + (j >= n ? perimeter : 0.0);
    return s;
  };
  std::vector<double> total(n, 0.0);
  std::vector<std::size_t> first(n), last(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t hi = i;
    while (hi + 1 < i + n && ahead(i, hi + 1) <= half) ++hi;
    std::size_t lo = i + n;
    while (lo - 1 > hi && perimeter - ahead(i, lo - 1) <= half) --lo;
    double t = 0.0;
    for (std::size_t j = i; j <= hi; ++j) t += turn[j % n];
    for (std::size_t j = lo; j < i + n; ++j) t += turn[j % n];
    total[i] = t;
    first[i] = lo % n;
    last[i] = hi % n;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(total[a]) > std::abs(total[b]); });
  std::vector<Corner> out;
  std::vector<double> where;
  for (std::size_t i : order) {
    if (std::abs(total[i]) < min_turn) break;
    bool near = false;
    for (double s : where) {
      const double gap = std::abs(arc[i] - s);
      near = near || std::min(gap, perimeter - gap) <= 2.0 * half;
    }
    if (near) continue;
    // Center: where the partial turning crosses half the window total.
    std::size_t j = first[i];
    double acc = turn[j];
    while (j != last[i] && std::abs(acc) < 0.5 * std::abs(total[i])) {
      j = (j + 1) % n;
      acc += turn[j];
    }
    Corner c;
    c.vertex = d.vertex(j);
    const Point in = d.vertex(first[i]) - d.vertex(first[i] + n - 1);
    const Point outv = d.vertex(last[i] + 1) - d.vertex(last[i]);
    c.in_dir = in / std::abs(in);
    c.out_dir = outv / std::abs(outv);
    c.turn = total[i];
    out.push_back(c);
    where.push_back(arc[j]);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    double nearest = 0.5 * perimeter;
    for (std::size_t m = 0; m < out.size(); ++m) {
      if (m == k) continue;
      const double gap = std::abs(where[k] - where[m]);
      nearest = std::min(nearest, std::min(gap, perimeter - gap));
    }
    out[k].local = 0.5 * nearest;
  }
  return out;
}

constexpr double kCornerTurn = 0.1 * std::numbers::pi;

struct CornerPoles {
  std::vector<Point> poles;
  std::vector<double> radii;  // distance of each pole from its corner
  std::vector<Point> extra_samples;
};

// Poles clustered exponentially toward each reflex corner along the
// exterior bisector, with matching graded boundary samples.
CornerPoles corner_poles(const PlanarDomain& d, int per_corner) {
  CornerPoles out;
  if (per_corner <= 0) return out;
  for (const Corner& c : find_corners(d, kCornerTurn)) {
    if (!(c.turn < 0.0)) continue;
    const Point e1 = -c.in_dir;
    const Point e2 = c.out_dir;
    if (std::abs(e1 + e2) < 1e-9) continue;
    const Point dir = (e1 + e2) / std::abs(e1 + e2);
    const double sn = std::sqrt(static_cast<double>(per_corner));
    for (int j = 1; j <= per_corner; ++j) {
      const double sigma = c.local * std::exp(-4.0 * (sn - std::sqrt(static_cast<double>(j))));
      const Point p = c.vertex + sigma * dir;
      if (!(d.signed_distance(p) < -0.25 * sigma)) continue;
      out.poles.push_back(p);
      out.radii.push_back(sigma);
      for (double f : {0.5, 1.0, 2.0}) {
        if (f * sigma < 2.0 * c.local) {
          out.extra_samples.push_back(c.vertex + f * sigma * e1);
          out.extra_samples.push_back(c.vertex + f * sigma * e2);
        }
      }
    }
  }
  return out;
}

DiscMapCandidate finish_candidate(const PlanarDomain& d, DiscMapCandidate c, int samples) {
  c.sup_bound = candidate_sup_bound(d, c, samples, &c.sampled_sup);
  return c;
}

// Lower bound p(f(z)/M, f(w)/M) for a candidate with sup bound M.
double planar_candidate_value(const DiscMapCandidate& c, Point z, Point w, double bound) {
  const Point a = evaluate_candidate(c, z) / bound;
  const Point b = evaluate_candidate(c, w) / bound;
  if (!(std::abs(a) < 1.0) || !(std::abs(b) < 1.0)) return 0.0;
  return safe_lower_artanh(std::abs(a - b) / std::abs(1.0 - std::conj(a) * b));
}

CaratheodoryResult caratheodory_planar(const PlanarDomain& d, Point z, Point w,
                                       const CaratheodoryOptions& opt) {
  double scale = 0.0;
  for (const Point& v : d.vertices()) scale = std::max(scale, std::abs(v - z));
  const int samples = std::max(opt.certify_samples, 64);

  std::vector<DiscMapCandidate> pool;
  {
    DiscMapCandidate lin;
    lin.coefficients = {0.0, 1.0};
    lin.origin = z;
    lin.scale = scale;
    pool.push_back(finish_candidate(d, std::move(lin), samples));
  }
  if (opt.warm_start && !opt.warm_start->coefficients.empty() &&
      std::abs(opt.warm_start->origin - z) <= 1e-15 * (1.0 + std::abs(z))) {
    // Re-express the earlier candidate in the current variable.
    DiscMapCandidate c = *opt.warm_start;
    const double ratio = scale / c.scale;
    double f = 1.0;
    for (auto& ck : c.coefficients) {
      ck *= f;
      f *= ratio;
    }
    c.scale = scale;
    pool.push_back(finish_candidate(d, std::move(c), samples));
  }
  if (opt.degree >= 2 || opt.poles_per_corner > 0) {
    const double spacing = opt.sample_spacing > 0.0 ? opt.sample_spacing : d.resolution();
    std::vector<Point> pts = d.densified_boundary(spacing);
    const CornerPoles cp = corner_poles(d, opt.poles_per_corner);
    pts.insert(pts.end(), cp.extra_samples.begin(), cp.extra_samples.end());
    std::vector<Point> u(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) u[i] = (pts[i] - z) / scale;

    Eigen::MatrixXcd Q;
    const ArnoldiBasis basis = ArnoldiBasis::build(u, opt.degree, &Q);
    const std::vector<Point> qz = basis.eval(0.0);
    const std::vector<Point> qw = basis.eval((w - z) / scale);
    const int np = opt.degree;
    const int nr = static_cast<int>(cp.poles.size());
    const int cols = np + nr;
    // Basis functions g with g(z) = 0: q_k - q_k(z) and sigma/(x-p) - sigma/(z-p).
    const auto m = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXcd A(m, cols);
    Eigen::VectorXcd gw(cols);
    for (int k = 1; k <= np; ++k) {
      A.col(k - 1) = Q.col(k).array() - qz[static_cast<std::size_t>(k)];
      gw(k - 1) = qw[static_cast<std::size_t>(k)] - qz[static_cast<std::size_t>(k)];
    }
    for (int r = 0; r < nr; ++r) {
      const Point p = cp.poles[static_cast<std::size_t>(r)];
      const double s = cp.radii[static_cast<std::size_t>(r)];
      const Point at_z = s / (z - p);
      for (Eigen::Index i = 0; i < m; ++i) A(i, np + r) = s / (pts[static_cast<std::size_t>(i)] - p) - at_z;
      gw(np + r) = s / (w - p) - at_z;
    }
    // Eliminate the pivot column with the normalization f(w) = 1.
    Eigen::Index pivot = 0;
    for (Eigen::Index k = 1; k < np; ++k) {
      if (std::abs(gw(k)) > std::abs(gw(pivot))) pivot = k;
    }
    if (np == 0) {
      for (Eigen::Index k = 1; k < cols; ++k) {
        if (std::abs(gw(k)) > std::abs(gw(pivot))) pivot = k;
      }
    }
    const Eigen::VectorXcd t = A.col(pivot) / gw(pivot);
    Eigen::MatrixXcd C(m, cols - 1);
    for (Eigen::Index k = 0, c = 0; k < cols; ++k) {
      if (k == pivot) continue;
      C.col(c++) = A.col(k) - t * gw(k);
    }
    double best_max = 0.0;
    const Eigen::VectorXcd a = cols > 1 ? lawson(C, t, opt.lawson_iterations, &best_max)
                                        : Eigen::VectorXcd();
    Eigen::VectorXcd coef(cols);
    Point acc = 1.0;
    for (Eigen::Index k = 0, c = 0; k < cols; ++k) {
      if (k == pivot) continue;
      coef(k) = a(c++);
      acc -= coef(k) * gw(k);
    }
    coef(pivot) = acc / gw(pivot);

    DiscMapCandidate cand;
    cand.origin = z;
    cand.scale = scale;
    std::vector<Point> alpha(static_cast<std::size_t>(np) + 1, 0.0);
    Point constant = 0.0;
    for (int k = 1; k <= np; ++k) {
      alpha[static_cast<std::size_t>(k)] = coef(k - 1);
      constant -= coef(k - 1) * qz[static_cast<std::size_t>(k)];
    }
    cand.coefficients = basis.monomial(alpha);
    for (int r = 0; r < nr; ++r) {
      const Point p = cp.poles[static_cast<std::size_t>(r)];
      const Point res = coef(np + r) * cp.radii[static_cast<std::size_t>(r)];
      cand.poles.push_back(p);
      cand.residues.push_back(res);
      constant -= res / (z - p);
    }
    cand.coefficients[0] += constant;
    pool.push_back(finish_candidate(d, std::move(cand), samples));
  }

  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double v = planar_candidate_value(pool[i], z, w, pool[i].sup_bound);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  CaratheodoryResult out;
  out.candidate = pool[best];
  out.estimate.system = System::kCaratheodory;
  out.estimate.lower = best_value;
  const double sampled = planar_candidate_value(out.candidate, z, w, out.candidate.sampled_sup);
  out.estimate.slack = std::max(0.0, sampled - best_value);
  std::ostringstream prov;
  prov << "caratheodory: degree " << (out.candidate.coefficients.size() - 1) << " polynomial";
  if (!out.candidate.poles.empty()) prov << " with " << out.candidate.poles.size() << " corner poles";
  prov << ", Lawson minimax, proven sup bound from " << samples << " boundary samples";
  out.estimate.lower_provenance = prov.str();
  return out;
}

Point linear_value(const PointN& a, const PointN& v) {
  Point s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * v[i];
  return s;
}

CaratheodoryResult caratheodory_model(const ModelDomain& d, const PointN& z, const PointN& w,
                                      const CaratheodoryOptions& opt) {
  const std::size_t n = d.dim();
  const PointN vz = d.normalized(z);
  const PointN vw = d.normalized(w);
  // For a unit-sup linear form l, p(l(z), l(w)) is a lower bound for c.
  auto value_of = [&](const PointN& a) {
    const double s = d.linear_form_sup(a);
    if (!(s > 0.0)) return 0.0;
    const Point lz = linear_value(a, vz) / s;
    const Point lw = linear_value(a, vw) / s;
    if (std::abs(lz) >= 1.0 || std::abs(lw) >= 1.0) return 0.0;
    return hyperbolic_distance(lz, lw).value;
  };
  auto unpack = [&](const std::vector<double>& x) {
    PointN a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = Point(x[2 * i], x[2 * i + 1]);
    return a;
  };
  auto pack = [&](const PointN& a) {
    std::vector<double> x(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      x[2 * i] = a[i].real();
      x[2 * i + 1] = a[i].imag();
    }
    return x;
  };

  std::vector<PointN> starts;
  for (std::size_t i = 0; i < n; ++i) {
    PointN e(n, 0.0);
    e[i] = 1.0;
    starts.push_back(e);
  }
  PointN diff = sub(vw, vz);
  for (auto& x : diff) x = std::conj(x);
  starts.push_back(diff);
  PointN cw = vw;
  for (auto& x : cw) x = std::conj(x);
  starts.push_back(cw);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < opt.random_starts; ++k) {
    PointN a(n);
    for (auto& x : a) x = Point(gauss(rng), gauss(rng));
    starts.push_back(a);
  }
  if (opt.warm_start && opt.warm_start->linear_form.size() == n) {
    starts.push_back(opt.warm_start->linear_form);
  }

  PointN best_a = starts.front();
  double best_value = -1.0;
  for (const PointN& a0 : starts) {
    if (norm2(a0) == 0.0) continue;
    const double v0 = value_of(a0);
    if (v0 > best_value) {
      best_value = v0;
      best_a = a0;
    }
    if (n == 1) continue;  // every nonzero form is optimal up to rotation
    auto f = [&](const std::vector<double>& x) { return -value_of(unpack(x)); };
    const double step = 0.25 * norm2(a0);
    const detail::OptimizeResult r = detail::nelder_mead(f, pack(a0), step, 400 * static_cast<int>(n), 1e-14);
    if (-r.value > best_value) {
      best_value = -r.value;
      best_a = unpack(r.x);
    }
  }
  const double s = d.linear_form_sup(best_a);
  for (auto& x : best_a) x /= s;

  CaratheodoryResult out;
  out.candidate.linear_form = best_a;
  out.candidate.origin = 0.0;
  out.candidate.scale = 1.0;
  out.candidate.sup_bound = 1.0;
  out.candidate.sampled_sup = 1.0;
  out.estimate.system = System::kCaratheodory;
  out.estimate.lower = std::max(0.0, best_value - 4e-15 * (1.0 + best_value));
  out.estimate.lower_provenance =
      "caratheodory: exact-sup linear form composed with a disc automorphism";
  return out;
}

// --- Lempert ----------------------------------------------------------------

// Margin evaluation for disc points, with gradients in the complex sense:
// dm = Re(sum_c conj(g_c) dphi_c).
class MarginField {
 public:
  explicit MarginField(const Domain& d) : domain_(d) {
    if (const PlanarDomain* p = as_planar(d)) {
      index_.emplace(*p);
      resolution_ = p->resolution();
    } else {
      model_ = &std::get<ModelDomain>(d);
    }
  }

  const Domain& domain() const { return domain_; }
  bool planar() const { return index_.has_value(); }
  std::size_t dim() const { return domain_dim(domain_); }
  const PolygonIndex& index() const { return *index_; }
  const ModelDomain& model() const { return *model_; }

  double margin(const PointN& p, PointN* grad) const {
    if (index_) {
      const PolygonIndex::Query q = index_->query(p[0]);
      if (grad != nullptr) {
        const Point dvec = p[0] - q.nearest;
        const double len = std::abs(dvec);
        (*grad)[0] = len > 0.0 ? (q.signed_distance >= 0.0 ? 1.0 : -1.0) * dvec / len : 0.0;
      }
      return q.signed_distance;
    }
    const PointN v = model_->normalized(p);
    const auto& M = model_->normalizing_matrix();
    const std::size_t n = v.size();
    if (model_->kind() == ModelDomain::Kind::kPolydisc) {
      std::size_t active = 0;
      for (std::size_t c = 1; c < n; ++c) {
        if (std::abs(v[c]) > std::abs(v[active])) active = c;
      }
      const double mag = std::abs(v[active]);
      if (grad != nullptr) {
        const Point u = mag > 0.0 ? v[active] / mag : 0.0;
        for (std::size_t k = 0; k < n; ++k) (*grad)[k] = -std::conj(M[active * n + k]) * u;
      }
      return 1.0 - mag;
    }
    const double nv = norm2(v);
    if (grad != nullptr) {
      for (std::size_t k = 0; k < n; ++k) {
        Point acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += std::conj(M[c * n + k]) * v[c];
        (*grad)[k] = nv > 0.0 ? -acc / nv : 0.0;
      }
    }
    return 1.0 - nv;
  }

  // Size of a coefficient vector in the metric the margin is 1-Lipschitz in.
  double weight(const PointN& v) const {
    if (index_) return std::abs(v[0]);
    const auto& M = model_->normalizing_matrix();
    const std::size_t n = v.size();
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      Point acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += M[c * n + k] * v[k];
      s += std::norm(acc);
    }
    return std::sqrt(s);
  }

  // Second-derivative bound of theta -> P(e^{i theta}) for the polynomial part.
  double curvature_bound(const std::vector<PointN>& coeffs) const {
    double b2 = 0.0;
    for (std::size_t j = 1; j < coeffs.size(); ++j) {
      b2 += static_cast<double>(j * j) * weight(coeffs[j]);
    }
    return b2;
  }

 private:
  const Domain& domain_;
  std::optional<PolygonIndex> index_;
  const ModelDomain* model_ = nullptr;
  double resolution_ = 0.0;
};

PointN eval_disc(const AnalyticDiscCandidate& d, Point zeta) {
  PointN out(d.coefficients.front().size(), 0.0);
  for (auto it = d.coefficients.rbegin(); it != d.coefficients.rend(); ++it) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = out[c] * zeta + (*it)[c];
  }
  for (std::size_t k = 0; k < d.poles.size(); ++k) {
    const Point inv = 1.0 / (zeta - d.poles[k]);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += d.residues[k][c] * inv;
  }
  return out;
}

AnalyticDiscCandidate verify_with(const MarginField& field, AnalyticDiscCandidate cand,
                                  const PointN& w, int samples) {
  const double lambda = cand.lambda;
  cand.interpolation_error = norm2(sub(eval_disc(cand, lambda), w));
  bool poles_ok = cand.poles.size() == cand.residues.size();
  for (const Point& q : cand.poles) poles_ok = poles_ok && std::abs(q) > 1.0;
  const double poly_b2 = field.curvature_bound(cand.coefficients);
  std::vector<double> res_weight(cand.poles.size());
  for (std::size_t k = 0; k < cand.poles.size() && poles_ok; ++k) res_weight[k] = field.weight(cand.residues[k]);

  // Each arc stays within delta^2/8 sup|phi''| of its chord, with
  // |d^2/dtheta^2 r/(e^{i theta} - q)| <= |r| (1/d^2 + 2/d^3). Arcs are split
  // until the chord clearance dominates.
  auto arc_bound = [&](double t0, double t1) {
    const double delta = t1 - t0;
    const Point mid = std::polar(1.0, 0.5 * (t0 + t1));
    double b2 = poly_b2;
    for (std::size_t k = 0; k < cand.poles.size(); ++k) {
      const double dist = std::abs(cand.poles[k] - mid) - 0.5 * delta;
      if (dist <= 0.0) return kInf;
      b2 += res_weight[k] * (1.0 / (dist * dist) + 2.0 / (dist * dist * dist));
    }
    return delta * delta / 8.0 * b2;
  };
  auto clearance = [&](const PointN& a, const PointN& b) {
    if (field.planar()) {
      // If every chord clears the boundary, phi(circle) lies in the simply
      // connected D and the argument principle puts phi(disc) inside D.
      const double sa = field.index().signed_distance(a[0]);
      return sa <= 0.0 ? sa : field.index().segment_clearance(a[0], b[0]);
    }
    // The margin is concave and 1-Lipschitz in normalized coordinates; the
    // maximum principle extends the circle check to the closed disc.
    return std::min(field.margin(a, nullptr), field.margin(b, nullptr));
  };
  double worst = poles_ok ? kInf : -kInf;
  const int K = std::max(samples, 8);
  struct Arc {
    double t0, t1;
    PointN a, b;
    int depth;
  };
  std::vector<Arc> stack;
  PointN first = eval_disc(cand, 1.0);
  PointN prev = first;
  for (int k = 0; k < K && worst > 0.0; ++k) {
    const double t0 = kTwoPi * k / K;
    const double t1 = kTwoPi * (k + 1) / K;
    PointN next = k + 1 == K ? first : eval_disc(cand, std::polar(1.0, t1));
    stack.push_back({t0, t1, prev, next, 0});
    prev = std::move(next);
    while (!stack.empty() && worst > 0.0) {
      Arc arc = std::move(stack.back());
      stack.pop_back();
      const double clear = clearance(arc.a, arc.b);
      const double dev = arc_bound(arc.t0, arc.t1);
      if (clear - dev > 0.0 || clear <= 0.0 || arc.depth >= 40) {
        worst = std::min(worst, clear - dev * (1.0 + 1e-9) - 1e-15);
        continue;
      }
      const double tm = 0.5 * (arc.t0 + arc.t1);
      PointN m = eval_disc(cand, std::polar(1.0, tm));
      stack.push_back({tm, arc.t1, m, std::move(arc.b), arc.depth + 1});
      stack.push_back({arc.t0, tm, std::move(m), std::move(arc.a), arc.depth + 1});
    }
    stack.clear();
  }
  cand.certified_margin = worst;
  double interior = kInf;
  for (int ri = 1; ri <= 8; ++ri) {
    for (int k = 0; k < 48; ++k) {
      interior = std::min(interior, field.margin(eval_disc(cand, std::polar(ri / 9.0, k * kTwoPi / 48)), nullptr));
    }
  }
  cand.interior_margin = interior;
  cand.feasible = cand.certified_margin > 0.0 && cand.interpolation_error <= 1e-10 &&
                  lambda > 0.0 && lambda < 1.0;
  return cand;
}

// Free directions of the disc: zeta^j for j >= 2 and s / (zeta - q) for the
// poles, each corrected by constant and linear terms so that phi(0) = z and
// phi(r) = w hold for every parameter value.
struct DiscBasis {
  int degree = 1;
  std::vector<Point> poles;
  std::vector<double> scales;

  std::size_t monomials() const { return static_cast<std::size_t>(std::max(degree - 1, 0)); }
  std::size_t columns() const { return monomials() + poles.size(); }

  Point raw(std::size_t c, Point zeta) const {
    if (c < monomials()) return std::pow(zeta, static_cast<int>(c) + 2);
    const std::size_t k = c - monomials();
    return scales[k] / (zeta - poles[k]);
  }

  Point column(std::size_t c, Point zeta, double r) const {
    const Point r0 = raw(c, 0.0);
    return raw(c, zeta) - r0 - (raw(c, r) - r0) * zeta / r;
  }

  // phi(zeta) = z + (w - z) zeta / r + sum_c x_c column_c(zeta).
  AnalyticDiscCandidate build(const PointN& z, const PointN& w, double r,
                              const std::vector<double>& x) const {
    const std::size_t n = z.size();
    AnalyticDiscCandidate d;
    d.lambda = r;
    d.coefficients.assign(static_cast<std::size_t>(std::max(degree, 1)) + 1, PointN(n, 0.0));
    d.coefficients[0] = z;
    for (std::size_t i = 0; i < n; ++i) d.coefficients[1][i] = (w[i] - z[i]) / r;
    for (std::size_t c = 0; c < columns(); ++c) {
      const Point r0 = raw(c, 0.0);
      const Point slope = (raw(c, r) - r0) / r;
      PointN amp(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = (c * n + i) * 2;
        amp[i] = Point(x[off], x[off + 1]);
        d.coefficients[0][i] -= amp[i] * r0;
        d.coefficients[1][i] -= amp[i] * slope;
      }
      if (c < monomials()) {
        d.coefficients[c + 2] = amp;
      } else {
        const std::size_t k = c - monomials();
        for (Point& a : amp) a *= scales[k];
        d.poles.push_back(poles[k]);
        d.residues.push_back(std::move(amp));
      }
    }
    return d;
  }
};

// Polynomial free parameters of an existing disc; pole directions start at 0.
std::vector<double> free_parameters(const AnalyticDiscCandidate& d, const DiscBasis& basis,
                                    std::size_t n) {
  std::vector<double> x(basis.columns() * n * 2, 0.0);
  for (std::size_t j = 2; j < d.coefficients.size() && j - 2 < basis.monomials(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = ((j - 2) * n + i) * 2;
      x[off] = d.coefficients[j][i].real();
      x[off + 1] = d.coefficients[j][i].imag();
    }
  }
  return x;
}

int samples_for(double b2, double target) {
  const double need = kTwoPi * std::sqrt(b2 / (4.0 * target));
  int k = 64;
  while (k < need && k < (1 << 18)) k *= 2;
  return k;
}

class LempertSolver {
 public:
  LempertSolver(const Domain& d, const PointN& z, const PointN& w, const LempertOptions& opt)
      : field_(d), z_(z), w_(w), opt_(opt), n_(z.size()) {
    target_ = field_.planar() ? opt.target_margin * domain_resolution(d) : opt.model_target_margin;
    opt_samples_ = opt.optimize_samples > 0 ? opt.optimize_samples : std::max(96, 16 * opt.degree);
  }

  AnalyticDiscCandidate verify(AnalyticDiscCandidate d) const {
    const double b2 = field_.curvature_bound(d.coefficients);
    const int k = std::max(opt_.verify_samples, samples_for(b2, 0.5 * target_));
    return verify_with(field_, std::move(d), w_, k);
  }

  // Smallest verified r for the straight disc, by bisection.
  std::optional<AnalyticDiscCandidate> straight() const {
    const DiscBasis line;
    auto at = [&](double r) { return verify(line.build(z_, w_, r, {})); };
    double hi = 1.0 - 1e-9;
    AnalyticDiscCandidate top = at(hi);
    if (!top.feasible) return std::nullopt;
    double lo = lower_radius();
    for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      AnalyticDiscCandidate c = at(mid);
      if (c.feasible) {
        hi = mid;
        top = std::move(c);
      } else {
        lo = mid;
      }
    }
    return top;
  }

  // Schwarz-lemma lower bound on any feasible r.
  double lower_radius() const {
    if (field_.planar()) {
      const auto& v = std::get<PlanarDomain>(field_.domain()).vertices();
      double rout = 0.0;
      for (const Point& p : v) rout = std::max(rout, std::abs(p - z_[0]));
      return std::abs(w_[0] - z_[0]) / rout;
    }
    const ModelDomain& m = field_.model();
    const PointN vz = m.normalized(z_);
    const PointN vw = m.normalized(w_);
    if (m.kind() == ModelDomain::Kind::kPolydisc) {
      // Each coordinate of v o phi is a self-map of the unit disc.
      double r = 0.0;
      for (std::size_t i = 0; i < vz.size(); ++i) r = std::max(r, mobius_distance(vz[i], vw[i]));
      return r * (1.0 - 1e-12);
    }
    return norm2(sub(vw, vz)) / (1.0 + norm2(vz));
  }

  // Softmin-margin ascent at fixed r. Returns true when the sampled margin
  // reaches the target.
  bool optimize(const DiscBasis& basis, double r, std::vector<double>& x) const {
    const std::size_t m = basis.columns();
    if (m == 0) return false;
    // Graded extra samples next to each pole.
    std::vector<double> extra;
    for (std::size_t k = 0; k < basis.poles.size(); ++k) {
      const double alpha = std::arg(basis.poles[k]);
      const double sigma = std::abs(basis.poles[k]) - 1.0;
      for (double t : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) extra.push_back(alpha + t * sigma);
    }
    int K = opt_samples_;
    const double span = norm2(sub(w_, z_));
    double tau = std::max(4.0 * target_, 0.05 * span);
    for (int round = 0; round < 24; ++round) {
      std::vector<Point> zeta;
      for (int k = 0; k < K; ++k) zeta.push_back(std::polar(1.0, kTwoPi * k / K));
      for (double t : extra) zeta.push_back(std::polar(1.0, t));
      const std::size_t S = zeta.size();
      std::vector<Point> E(S * m);
      for (std::size_t k = 0; k < S; ++k) {
        for (std::size_t c = 0; c < m; ++c) E[k * m + c] = basis.column(c, zeta[k], r);
      }
      std::vector<double> margins(S);
      std::vector<PointN> grads(S, PointN(n_));
      double min_margin = -kInf;
      auto eval = [&](const std::vector<double>& xx, std::vector<double>& g) {
        const AnalyticDiscCandidate d = basis.build(z_, w_, r, xx);
        double mn = kInf;
        for (std::size_t k = 0; k < S; ++k) {
          margins[k] = field_.margin(eval_disc(d, zeta[k]), &grads[k]);
          mn = std::min(mn, margins[k]);
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < S; ++k) sum += std::exp(-(margins[k] - mn) / tau);
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t k = 0; k < S; ++k) {
          const double p = std::exp(-(margins[k] - mn) / tau) / sum;
          if (p < 1e-18) continue;
          for (std::size_t j = 0; j < m; ++j) {
            const Point e = E[k * m + j];
            for (std::size_t i = 0; i < n_; ++i) {
              const Point cg = std::conj(grads[k][i]);
              const std::size_t off = (j * n_ + i) * 2;
              // Minimizing the negated softmin.
              g[off] -= p * (cg * e).real();
              g[off + 1] -= p * (cg * Point(0.0, 1.0) * e).real();
            }
          }
        }
        min_margin = mn;
        return -(mn - tau * std::log(sum));
      };
      bool reached = false;
      auto stop = [&](const std::vector<double>&, double) {
        reached = min_margin >= target_;
        return reached;
      };
      detail::OptimizeResult res = detail::bfgs(eval, x, opt_.max_inner_iterations, 1e-12, stop);
      x = res.x;
      std::vector<double> g(x.size());
      eval(x, g);
      if (min_margin >= target_) {
        const AnalyticDiscCandidate d = basis.build(z_, w_, r, x);
        const int need = samples_for(field_.curvature_bound(d.coefficients), 0.5 * target_) / 2;
        if (K >= need || K >= (1 << 14)) return true;
        K *= 2;
        continue;
      }
      if (tau <= 0.5 * target_) return false;
      tau *= 0.3;
    }
    return false;
  }

  // Bracket width below which the metric value moves by at most ~1e-5.
  double bisection_tolerance(double hi) const {
    return std::max(1e-5 * (1.0 - hi * hi), 1e-9 * hi);
  }

  bool attempt(const DiscBasis& basis, double r, std::vector<double>& x,
               std::optional<AnalyticDiscCandidate>& best) const {
    std::vector<double> trial = x;
    if (!optimize(basis, r, trial)) return false;
    AnalyticDiscCandidate c = verify(basis.build(z_, w_, r, trial));
    if (!c.feasible) return false;
    best = std::move(c);
    x = std::move(trial);
    return true;
  }

  void bisect(const DiscBasis& basis, std::vector<double>& x,
              std::optional<AnalyticDiscCandidate>& best) const {
    double lo = lower_radius();
    double hi = best->lambda;
    for (int step = 0; step < opt_.bisection_steps && hi - lo > bisection_tolerance(hi); ++step) {
      const double r = 0.5 * (lo + hi);
      if (attempt(basis, r, x, best)) {
        hi = r;
      } else {
        lo = r;
      }
    }
  }

  // Poles outside the circle, clustered at the angles where `disc` comes
  // closest to each sharp corner of the polygon.
  DiscBasis corner_basis(const AnalyticDiscCandidate& disc) const {
    DiscBasis basis;
    basis.degree = opt_.degree;
    const PlanarDomain& dom = std::get<PlanarDomain>(field_.domain());
    const int grid = 4096;
    std::vector<Point> curve(grid);
    for (int k = 0; k < grid; ++k) curve[static_cast<std::size_t>(k)] = eval_disc(disc, std::polar(1.0, kTwoPi * k / grid))[0];
    const int N = opt_.poles_per_corner;
    for (const Corner& corner : find_corners(dom, kCornerTurn)) {
      const Point v = corner.vertex;
      int kbest = 0;
      for (int k = 1; k < grid; ++k) {
        if (std::abs(curve[static_cast<std::size_t>(k)] - v) < std::abs(curve[static_cast<std::size_t>(kbest)] - v)) kbest = k;
      }
      // Golden-section refinement within one grid step.
      const double h = kTwoPi / grid;
      double a = (kbest - 1) * h;
      double b = (kbest + 1) * h;
      auto dist = [&](double t) { return std::abs(eval_disc(disc, std::polar(1.0, t))[0] - v); };
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 40; ++it) {
        const double c = b - g * (b - a);
        const double d = a + g * (b - a);
        if (dist(c) < dist(d)) {
          b = d;
        } else {
          a = c;
        }
      }
      const double theta = 0.5 * (a + b);
      for (int j = 1; j <= N; ++j) {
        const double sigma = std::exp(-4.0 * (std::sqrt(static_cast<double>(N)) - std::sqrt(static_cast<double>(j))));
        basis.poles.push_back(std::polar(1.0 + sigma, theta));
        basis.scales.push_back(sigma);
      }
    }
    return basis;
  }

  LempertResult run() const {
    std::optional<AnalyticDiscCandidate> best = straight();
    DiscBasis poly;
    poly.degree = opt_.degree;
    std::vector<double> x(poly.columns() * n_ * 2, 0.0);
    if (opt_.warm_start && !opt_.warm_start->coefficients.empty() &&
        opt_.warm_start->coefficients.front().size() == n_) {
      AnalyticDiscCandidate c = verify(*opt_.warm_start);
      if (c.feasible && (!best || c.lambda < best->lambda)) {
        if (c.poles.empty()) x = free_parameters(c, poly, n_);
        best = std::move(c);
      }
    }
    if (opt_.degree >= 2) {
      std::mt19937_64 rng(opt_.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double span = norm2(sub(w_, z_));
      // Without any feasible disc, look for one near r = 1 first.
      for (int trial = 0; trial < 4 && !best; ++trial) {
        std::vector<double> start = x;
        if (trial > 0) {
          for (double& v : start) v = 0.1 * span * gauss(rng);
        }
        if (attempt(poly, 0.995, start, best)) x = start;
      }
      if (best) bisect(poly, x, best);
      if (best && field_.planar() && opt_.poles_per_corner > 0) {
        const DiscBasis lightning = corner_basis(*best);
        if (!lightning.poles.empty()) {
          x.resize(lightning.columns() * n_ * 2, 0.0);
          bisect(lightning, x, best);
        }
      }
    }
    LempertResult out;
    out.estimate.system = System::kLempert;
    if (!best) {
      out.estimate.upper = kInf;
      out.estimate.notes.push_back("lempert: no feasible disc found");
      return out;
    }
    out.estimate.upper = safe_upper_artanh(best->lambda);
    std::ostringstream prov;
    prov << "lempert: degree " << (best->coefficients.size() - 1) << " disc with "
         << best->poles.size() << " poles, certified margin " << best->certified_margin;
    out.estimate.upper_provenance = prov.str();
    out.candidate = std::move(best);
    return out;
  }

 private:
  MarginField field_;
  PointN z_, w_;
  LempertOptions opt_;
  std::size_t n_;
  double target_ = 0.0;
  int opt_samples_ = 0;
};

}  // namespace

std::size_t domain_dim(const Domain& d) {
  return as_planar(d) ? 1 : std::get<ModelDomain>(d).dim();
}

double domain_margin(const Domain& d, const PointN& z) {
  if (const PlanarDomain* p = as_planar(d)) return p->signed_distance(z.at(0));
  return std::get<ModelDomain>(d).normalized_margin(z);
}

double domain_resolution(const Domain& d) {
  if (const PlanarDomain* p = as_planar(d)) return p->resolution();
  return 1e-9;
}

Point evaluate_candidate(const DiscMapCandidate& f, Point x) {
  Point v = horner(f.coefficients, (x - f.origin) / f.scale);
  for (std::size_t k = 0; k < f.poles.size(); ++k) v += f.residues[k] / (x - f.poles[k]);
  return v;
}

double candidate_sup_bound(const PlanarDomain& d, const DiscMapCandidate& f, int samples,
                           double* sampled_max) {
  const double h = d.perimeter() / std::max(samples, 1);
  const std::vector<Point> pts = d.densified_boundary(h);
  // Sampled bounds on the polynomial derivatives: sup |P^(j)| <= S_j + h/2
  // sup |P^(j+1)| along each straight piece, closed by P^(deg+1) = 0.
  std::vector<Point> deriv = f.coefficients;
  std::vector<double> s;
  for (std::size_t j = 0; j + 1 < f.coefficients.size() || j == 0; ++j) {
    if (j > 0) {
      std::vector<Point> next(deriv.size() > 1 ? deriv.size() - 1 : 1, 0.0);
      for (std::size_t k = 1; k < deriv.size(); ++k) next[k - 1] = deriv[k] * static_cast<double>(k);
      deriv = std::move(next);
    }
    s.push_back(kernels::max_abs_polynomial(pts, deriv, f.origin, f.scale).value *
                std::pow(f.scale, -static_cast<double>(j)));
    if (deriv.size() <= 1) break;
  }
  double b = 0.0;
  for (std::size_t j = s.size(); j-- > 2;) b = s[j] + 0.5 * h * b;
  const double poly_b2 = s.size() > 2 ? b : 0.0;

  // Rounding allowance for the evaluation itself.
  double magnitude = 0.0;
  for (const Point& c : f.coefficients) magnitude += std::abs(c);
  double min_pole_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < f.poles.size(); ++k) {
    const double dist = -d.signed_distance(f.poles[k]);
    if (!(dist > 0.0)) throw DomainError("candidate pole is not outside the domain");
    min_pole_dist = std::min(min_pole_dist, dist);
    magnitude += std::abs(f.residues[k]) / dist;
  }

  // Chord bound per piece: |f| <= max(|f(a)|, |f(b)|) + len^2/8 sup |f''|,
  // with 2 |r| / dist(p, piece)^3 for each pole; pieces are split until
  // the pole term is small.
  const std::size_t n = pts.size();
  std::vector<Point> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = evaluate_candidate(f, pts[i]);
  double sampled = 0.0;
  for (const Point& v : values) sampled = std::max(sampled, std::abs(v));
  const double tol = 1e-9 * std::max(sampled, 1e-300);
  double bound = 0.0;
  double sampled_all = sampled;
  struct Piece {
    Point a, b;
    double fa, fb;
    int depth;
  };
  std::vector<Piece> stack;
  for (std::size_t i = 0; i < n; ++i) {
    stack.push_back({pts[i], pts[(i + 1) % n], std::abs(values[i]), std::abs(values[(i + 1) % n]), 0});
    while (!stack.empty()) {
      const Piece pc = stack.back();
      stack.pop_back();
      const double len = std::abs(pc.b - pc.a);
      double b2 = poly_b2;
      for (std::size_t k = 0; k < f.poles.size(); ++k) {
        const double dist = point_segment_distance(f.poles[k], pc.a, pc.b);
        b2 += 2.0 * std::abs(f.residues[k]) / (dist * dist * dist);
      }
      const double err = len * len / 8.0 * b2;
      if (err <= tol + len * len / 8.0 * poly_b2 || pc.depth >= 48) {
        bound = std::max(bound, std::max(pc.fa, pc.fb) + err);
        continue;
      }
      const Point mid = 0.5 * (pc.a + pc.b);
      const double fm = std::abs(evaluate_candidate(f, mid));
      sampled_all = std::max(sampled_all, fm);
      stack.push_back({pc.a, mid, pc.fa, fm, pc.depth + 1});
      stack.push_back({mid, pc.b, fm, pc.fb, pc.depth + 1});
    }
  }
  if (sampled_max != nullptr) *sampled_max = sampled_all;
  return bound * (1.0 + 1e-12) + 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
}

double polynomial_sup_bound(const PlanarDomain& d, const std::vector<Point>& coefficients,
                            Point origin, double scale, int samples, double* sampled_max) {
  DiscMapCandidate f;
  f.coefficients = coefficients;
  f.origin = origin;
  f.scale = scale;
  return candidate_sup_bound(d, f, samples, sampled_max);
}

CaratheodoryResult caratheodory_lower(const Domain& d, const PointN& z, const PointN& w,
                                      const CaratheodoryOptions& options) {
  check_points(d, z, w);
  if (options.degree < 1) throw ConfigError("caratheodory degree must be at least 1");
  if (const PlanarDomain* p = as_planar(d)) return caratheodory_planar(*p, z[0], w[0], options);
  return caratheodory_model(std::get<ModelDomain>(d), z, w, options);
}

AnalyticDiscCandidate verify_disc(const Domain& d, AnalyticDiscCandidate disc, const PointN& w,
                                  int verify_samples) {
  if (disc.coefficients.empty() || disc.coefficients.front().size() != domain_dim(d)) {
    throw DomainError("disc coefficients do not match the domain dimension");
  }
  for (const PointN& r : disc.residues) {
    if (r.size() != domain_dim(d)) throw DomainError("disc residues do not match the domain dimension");
  }
  MarginField field(d);
  return verify_with(field, std::move(disc), w, verify_samples);
}

PointN evaluate_disc(const AnalyticDiscCandidate& disc, Point zeta) { return eval_disc(disc, zeta); }

LempertResult lempert_upper(const Domain& d, const PointN& z, const PointN& w,
                            const LempertOptions& options) {
  check_points(d, z, w);
  if (options.degree < 1) throw ConfigError("lempert degree must be at least 1");
  if (norm2(sub(w, z)) == 0.0) {
    LempertResult out;
    out.estimate.system = System::kLempert;
    out.estimate.upper = 0.0;
    out.estimate.upper_provenance = "lempert: coincident points";
    return out;
  }
  LempertSolver solver(d, z, w, options);
  return solver.run();
}

KobayashiResult kobayashi_upper(const Domain& d, const PointN& z, const PointN& w,
                                const std::vector<PointN>& waypoints,
                                const LempertOptions& options) {
  check_points(d, z, w);
  const std::size_t m = waypoints.size();
  auto find = [&](const PointN& p) {
    for (std::size_t i = 0; i < m; ++i) {
      if (norm2(sub(waypoints[i], p)) <= 1e-12 * (1.0 + norm2(p))) return i;
    }
    throw ConfigError("waypoint set must contain both endpoints");
  };
  const std::size_t src = find(z);
  const std::size_t dst = find(w);
  KobayashiResult out;
  out.edge_weights.assign(m * m, kInf);
  for (std::size_t i = 0; i < m; ++i) {
    out.edge_weights[i * m + i] = 0.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      double weight = kInf;
      try {
        weight = lempert_upper(d, waypoints[i], waypoints[j], options).estimate.upper;
      } catch (const DomainError&) {
        weight = kInf;
      }
      out.edge_weights[i * m + j] = weight;
      out.edge_weights[j * m + i] = weight;
    }
  }
  std::vector<double> dist(m, kInf);
  std::vector<std::size_t> prev(m, m);
  std::vector<bool> done(m, false);
  dist[src] = 0.0;
  for (std::size_t iter = 0; iter < m; ++iter) {
    std::size_t u = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (!done[i] && (u == m || dist[i] < dist[u])) u = i;
    }
    if (u == m || dist[u] == kInf) break;
    done[u] = true;
    for (std::size_t v = 0; v < m; ++v) {
      const double cand = dist[u] + out.edge_weights[u * m + v];
      if (!done[v] && cand < dist[v]) {
        dist[v] = cand;
        prev[v] = u;
      }
    }
  }
  out.estimate.system = System::kKobayashi;
  out.estimate.upper = dist[dst];
  if (dist[dst] == kInf) {
    out.estimate.notes.push_back("kobayashi: waypoint graph disconnected");
    return out;
  }
  for (std::size_t v = dst; v != m; v = prev[v]) {
    out.path.push_back(v);
    if (v == src) break;
  }
  std::reverse(out.path.begin(), out.path.end());
  std::ostringstream prov;
  prov << "kobayashi: " << (out.path.size() - 1) << "-link chain over " << m << " waypoints";
  out.estimate.upper_provenance = prov.str();
  return out;
}

MetricEstimate green_bounds(const Domain& d, const PointN& z, const PointN& w,
                            const SolverConfig& config, bool with_conformal) {
  const CaratheodoryResult c = caratheodory_lower(d, z, w, config.caratheodory);
  const LempertResult l = lempert_upper(d, z, w, config.lempert);
  MetricEstimate lower = to_star_estimate(c.estimate);
  MetricEstimate upper = to_star_estimate(l.estimate);
  MetricEstimate out = certify(lower, upper, config.certify_tolerance);
  if (const PlanarDomain* p = as_planar(d); p != nullptr && with_conformal) {
    out.exact = green_star_exact(*p, z[0], w[0]);
  }
  return out;
}

MetricEstimate estimate_system(const Domain& d, const PointN& z, const PointN& w,
                               System system, const SolverConfig& config) {
  if (system == System::kGreen) return green_bounds(d, z, w, config, config.green_conformal);
  const CaratheodoryResult c = caratheodory_lower(d, z, w, config.caratheodory);
  MetricEstimate lower = as_lower_bound_for(c.estimate, system);
  MetricEstimate upper;
  if (system == System::kKobayashi) {
    std::vector<PointN> waypoints{z, w};
    const int extra = std::max(config.segment_waypoints, 0);
    for (int k = 1; k <= extra; ++k) {
      const double t = static_cast<double>(k) / (extra + 1);
      PointN p(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) p[i] = z[i] + t * (w[i] - z[i]);
      if (domain_margin(d, p) > domain_resolution(d)) waypoints.push_back(p);
    }
    upper = kobayashi_upper(d, z, w, waypoints, config.lempert).estimate;
  } else {
    upper = as_upper_bound_for(lempert_upper(d, z, w, config.lempert).estimate, system);
  }
  return certify(lower, upper, config.certify_tolerance);
}

}  // namespace imlab
