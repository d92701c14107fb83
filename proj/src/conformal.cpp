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

#include "imlab/conformal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Dense>
#include <json.hpp>

#include "imlab/disc_metrics.hpp"
#include "imlab/errors.hpp"

namespace imlab {
namespace {

constexpr double kPi = std::numbers::pi;

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch would be overkill for the handful of orders used here;
// Newton on the Legendre recurrence is exact to rounding.
GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& cached_rule(int n) {
  static const std::array<GaussRule, 33> rules = [] {
    std::array<GaussRule, 33> r;
    for (int k = 1; k < 33; ++k) r[k] = gauss_legendre(k);
    return r;
  }();
  return rules.at(static_cast<std::size_t>(std::clamp(n, 1, 32)));
}

double turning_angle(Point prev, Point cur, Point next) {
  return std::arg((next - cur) / (cur - prev));
}

std::vector<std::pair<Point, Point>> make_panels(const PlanarDomain& d, double h,
                                                 const ConformalOptions& opt) {
  const std::size_t n = d.size();
  const double threshold = opt.corner_threshold_deg * kPi / 180.0;
  const double min_angle = opt.min_angle_deg * kPi / 180.0;
  std::vector<bool> corner(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double turn = turning_angle(d.vertex(i + n - 1), d.vertex(i), d.vertex(i + 1));
    const double interior = kPi - turn;
    if (interior < min_angle || interior > 2.0 * kPi - min_angle) {
      throw ConditioningError("polygon corner at vertex " + std::to_string(i) +
                              " is too sharp for the boundary integral solver");
    }
    corner[i] = std::abs(turn) > threshold;
  }
  std::vector<std::pair<Point, Point>> panels;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = d.vertex(i);
    const Point b = d.vertex(i + 1);
    const auto k = static_cast<int>(std::max(1.0, std::ceil(std::abs(b - a) / h)));
    std::vector<double> t;
    for (int j = 0; j <= k; ++j) t.push_back(static_cast<double>(j) / k);
    const bool left = corner[i];
    const bool right = corner[(i + 1) % n];
    if (k == 1 && left && right) t.insert(t.begin() + 1, 0.5);
    std::vector<double> extra;
    if (left) {
      const double t1 = t[1];
      for (int l = 1; l <= opt.corner_levels; ++l) extra.push_back(t1 / std::ldexp(1.0, l));
    }
    if (right) {
      const double tk = t[t.size() - 2];
      for (int l = 1; l <= opt.corner_levels; ++l) {
        extra.push_back(1.0 - (1.0 - tk) / std::ldexp(1.0, l));
      }
    }
    t.insert(t.end(), extra.begin(), extra.end());
    std::sort(t.begin(), t.end());
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
      panels.emplace_back(a + (b - a) * t[j], a + (b - a) * t[j + 1]);
    }
  }
  return panels;
}

// Antiderivative of log sqrt(t^2 + d^2) in t, d >= 0.
double log_antiderivative(double t, double d) {
  const double r2 = t * t + d * d;
  double value = -t;
  if (t != 0.0) value += 0.5 * t * std::log(r2);
  if (d > 0.0) value += d * std::atan(t / d);
  return value;
}

std::vector<Point> accuracy_probes(const PlanarDomain& d, Point z0) {
  const auto [lo, hi] = d.bounds();
  const double margin = 4.0 * d.resolution();
  std::vector<Point> probes;
  constexpr int kGrid = 9;
  for (int i = 1; i < kGrid; ++i) {
    for (int j = 1; j < kGrid; ++j) {
      const Point p(lo.real() + (hi.real() - lo.real()) * i / kGrid,
                    lo.imag() + (hi.imag() - lo.imag()) * j / kGrid);
      if (d.signed_distance(p) > margin) probes.push_back(p);
    }
  }
  probes.push_back(z0);
  return probes;
}

}  // namespace

double panel_log_integral(Point x, Point a, Point b) {
  const double len = std::abs(b - a);
  const Point u = (b - a) / len;
  const Point rel = (x - a) * std::conj(u);
  const double s0 = rel.real();
  const double d = std::abs(rel.imag());
  return log_antiderivative(len - s0, d) - log_antiderivative(-s0, d);
}

RiemannMap::RiemannMap(PlanarDomain domain, Point basepoint)
    : domain_(std::move(domain)), basepoint_(basepoint) {}

namespace {

struct Solution {
  std::vector<BoundaryPanel> panels;
  double gamma = 0.0;
};

Solution solve_symm(const PlanarDomain& d, Point z0, double h, const ConformalOptions& opt) {
  const auto geometry = make_panels(d, h, opt);
  const auto n = static_cast<Eigen::Index>(geometry.size());
  Eigen::MatrixXd a(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point mid = 0.5 * (geometry[i].first + geometry[i].second);
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = panel_log_integral(mid, geometry[j].first, geometry[j].second);
    }
    a(i, n) = -1.0;
    rhs(i) = -std::log(std::abs(mid - z0));
  }
  for (Eigen::Index j = 0; j < n; ++j) a(n, j) = std::abs(geometry[j].second - geometry[j].first);
  a(n, n) = 0.0;
  rhs(n) = -1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw ConditioningError("boundary integral system is singular");

  Solution s;
  s.gamma = x(n);
  s.panels.resize(geometry.size());
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    BoundaryPanel& p = s.panels[j];
    p.start = geometry[j].first;
    p.end = geometry[j].second;
    p.sigma = x(j);
    p.theta_start = theta;
    theta -= 2.0 * kPi * x(j) * std::abs(p.end - p.start);
    p.theta_end = theta;
  }
  return s;
}

}  // namespace

RiemannMap RiemannMap::build(const PlanarDomain& domain, Point z0,
                             const ConformalOptions& options) {
  if (!(domain.signed_distance(z0) > 2.0 * domain.resolution())) {
    throw DomainError("Riemann map basepoint must be interior with margin 2*resolution");
  }
  const double h = options.panel_length > 0.0 ? options.panel_length : domain.perimeter() / 320.0;

  auto assemble = [&](double panel_length) {
    RiemannMap map(domain, z0);
    Solution s = solve_symm(domain, z0, panel_length, options);
    map.panels_ = std::move(s.panels);
    map.gamma_ = s.gamma;
    map.gauss_nodes_ = options.gauss_nodes;
    // Normalize psi'(z0) > 0 from the Cauchy derivative at the basepoint.
    const GaussRule& rule = cached_rule(map.gauss_nodes_);
    std::complex<double> deriv = 0.0;
    for (const BoundaryPanel& p : map.panels_) {
      const Point half = 0.5 * (p.end - p.start);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        const Point zeta = p.start + (p.end - p.start) * t;
        const double theta = p.theta_start + (p.theta_end - p.theta_start) * t;
        deriv += rule.weights[q] * half * std::polar(1.0, theta) / ((zeta - z0) * (zeta - z0));
      }
    }
    deriv /= Point(0.0, 2.0 * kPi);
    map.theta0_ = -std::arg(deriv);
    map.derivative_at_basepoint_ = std::exp(-map.gamma_ + [&] {
      double v = 0.0;
      for (const BoundaryPanel& p : map.panels_) v += p.sigma * panel_log_integral(z0, p.start, p.end);
      return v;
    }());
    return map;
  };

  RiemannMap fine = assemble(options.estimate_accuracy ? 0.5 * h : h);
  if (options.estimate_accuracy) {
    const RiemannMap coarse = assemble(h);
    double diff = 0.0;
    for (const Point& p : accuracy_probes(domain, z0)) {
      diff = std::max(diff, std::abs(fine(p) - coarse(p)));
    }
    fine.accuracy_ = std::max(diff, 1e-14);
  } else {
    fine.accuracy_ = std::numeric_limits<double>::quiet_NaN();
  }
  return fine;
}

Point RiemannMap::cauchy(Point z) const {
  const GaussRule& rule = cached_rule(gauss_nodes_);
  std::complex<double> num = 0.0;
  std::complex<double> den = 0.0;
  // Subdivide panels that are close to z relative to their length.
  struct Piece {
    Point a, b;
    double ta, tb;
    int depth;
  };
  std::vector<Piece> stack;
  for (const BoundaryPanel& p : panels_) {
    stack.push_back({p.start, p.end, p.theta_start, p.theta_end, 0});
    while (!stack.empty()) {
      const Piece piece = stack.back();
      stack.pop_back();
      const double len = std::abs(piece.b - piece.a);
      if (piece.depth < 24 && point_segment_distance(z, piece.a, piece.b) < 1.5 * len) {
        const Point m = 0.5 * (piece.a + piece.b);
        const double tm = 0.5 * (piece.ta + piece.tb);
        stack.push_back({piece.a, m, piece.ta, tm, piece.depth + 1});
        stack.push_back({m, piece.b, tm, piece.tb, piece.depth + 1});
        continue;
      }
      const Point half = 0.5 * (piece.b - piece.a);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        const Point zeta = piece.a + (piece.b - piece.a) * t;
        const double theta = piece.ta + (piece.tb - piece.ta) * t;
        const Point k = rule.weights[q] * half / (zeta - z);
        num += k * std::polar(1.0, theta);
        den += k;
      }
    }
  }
  return num / den;
}

Point RiemannMap::operator()(Point z) const {
  if (!domain_.contains(z)) throw DomainError("point is outside the mapped domain");
  if (z == basepoint_) return 0.0;
  return std::polar(1.0, theta0_) * cauchy(z);
}

double RiemannMap::modulus(Point z) const {
  if (!domain_.contains(z)) throw DomainError("point is outside the mapped domain");
  if (z == basepoint_) return 0.0;
  double v = -gamma_;
  for (const BoundaryPanel& p : panels_) v += p.sigma * panel_log_integral(z, p.start, p.end);
  return std::abs(z - basepoint_) * std::exp(v);
}

std::vector<std::pair<Point, Point>> RiemannMap::boundary_correspondence() const {
  std::vector<std::pair<Point, Point>> out;
  out.reserve(panels_.size());
  for (const BoundaryPanel& p : panels_) {
    out.emplace_back(p.start, std::polar(1.0, p.theta_start + theta0_));
  }
  return out;
}

std::string RiemannMap::to_json() const {
  nlohmann::json j;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(domain_.content_hash()));
  j["format"] = "imlab.riemann_map";
  j["version"] = 1;
  j["polygon_hash"] = hash;
  j["resolution"] = domain_.resolution();
  j["basepoint"] = {basepoint_.real(), basepoint_.imag()};
  j["accuracy"] = accuracy_;
  j["log_constant"] = gamma_;
  j["theta0"] = theta0_;
  j["derivative_at_basepoint"] = derivative_at_basepoint_;
  j["gauss_nodes"] = gauss_nodes_;
  auto& rows = j["panels"] = nlohmann::json::array();
  for (const BoundaryPanel& p : panels_) {
    rows.push_back({p.start.real(), p.start.imag(), p.end.real(), p.end.imag(), p.sigma,
                    p.theta_start, p.theta_end});
  }
  return j.dump();
}

RiemannMap RiemannMap::from_json(const std::string& text, const PlanarDomain& domain) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("riemann map cache is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "imlab.riemann_map" || j.value("version", 0) != 1) {
    throw ConfigError("not an imlab riemann map cache (version 1)");
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(domain.content_hash()));
  if (j.at("polygon_hash").get<std::string>() != hash) {
    throw ConfigError("riemann map cache belongs to a different polygon");
  }
  RiemannMap map(domain, Point(j.at("basepoint")[0].get<double>(), j.at("basepoint")[1].get<double>()));
  map.accuracy_ = j.at("accuracy").get<double>();
  map.gamma_ = j.at("log_constant").get<double>();
  map.theta0_ = j.at("theta0").get<double>();
  map.derivative_at_basepoint_ = j.at("derivative_at_basepoint").get<double>();
  map.gauss_nodes_ = j.at("gauss_nodes").get<int>();
  for (const auto& row : j.at("panels")) {
    BoundaryPanel p;
    p.start = Point(row[0].get<double>(), row[1].get<double>());
    p.end = Point(row[2].get<double>(), row[3].get<double>());
    p.sigma = row[4].get<double>();
    p.theta_start = row[5].get<double>();
    p.theta_end = row[6].get<double>();
    map.panels_.push_back(p);
  }
  return map;
}

MetricEstimate pullback_metric(const RiemannMap& map, Point z, Point w, System system) {
  const double res = map.domain().resolution();
  for (Point p : {z, w}) {
    if (!(map.domain().signed_distance(p) > 2.0 * res)) {
      throw DomainError("pullback point must be interior with margin 2*resolution");
    }
  }
  const Point a = map(z);
  const Point b = map(w);
  const double m = mobius_distance(a, b);
  const double acc = std::isfinite(map.accuracy()) ? map.accuracy() : 0.0;
  // Schwarz-Pick: |dm| <= (1 - m^2) (|da| / (1-|a|^2) + |db| / (1-|b|^2)).
  const double spread = 5.0 * acc * (1.0 / (1.0 - std::norm(a)) + 1.0 / (1.0 - std::norm(b)));
  MetricEstimate e;
  e.system = system;
  e.lower_provenance = e.upper_provenance = "conformal pullback";
  e.slack = spread;
  if (system == System::kGreen) {
    const double dm = spread * (1.0 - m * m);
    e.exact = m;
    e.lower = std::max(0.0, m - dm);
    e.upper = std::min(1.0, m + dm);
  } else {
    const double p = std::atanh(m);
    e.exact = p;
    e.lower = std::max(0.0, p - spread);
    e.upper = p + spread;
  }
  e.certified = true;
  return e;
}

double green_star_exact(const PlanarDomain& domain, Point z, Point w,
                        const ConformalOptions& options) {
  ConformalOptions opt = options;
  opt.estimate_accuracy = false;
  return RiemannMap::build(domain, z, opt).modulus(w);
}

}  // namespace imlab
