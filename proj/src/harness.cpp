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

#include "imlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "imlab/conformal.hpp"
#include "imlab/errors.hpp"

namespace imlab {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phase in [0, 2 pi) from a seeded generator, independent of the standard
// library's distribution implementations.
double seeded_phase(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(n + 1)));
  return kTwoPi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Point grid_center(const PlanarDomain& d, double* inradius) {
  const auto [lo, hi] = d.bounds();
  const int g = 96;
  double best = -std::numeric_limits<double>::infinity();
  Point arg = 0.5 * (lo + hi);
  for (int i = 1; i < g; ++i) {
    for (int j = 1; j < g; ++j) {
      const Point p(lo.real() + (hi.real() - lo.real()) * i / g,
                    lo.imag() + (hi.imag() - lo.imag()) * j / g);
      const double s = d.signed_distance(p);
      if (s > best + 1e-12) {
        best = s;
        arg = p;
      }
    }
  }
  if (inradius != nullptr) *inradius = best;
  return arg;
}

}  // namespace

double AmplitudeLaw::operator()(int n) const {
  if (is_spike(n)) return scale * spike_scale / std::pow(n + shift, 0.5 * power);
  return scale / std::pow(n + shift, power);
}

bool AmplitudeLaw::is_spike(int n) const {
  return spike_scale > 0.0 && n >= 2 && (n & (n - 1)) == 0;
}

const char* wobble_mode_name(WobbleMode mode) {
  switch (mode) {
    case WobbleMode::kRadial:
      return "radial";
    case WobbleMode::kAlternating:
      return "alternating";
    case WobbleMode::kSpiky:
      return "spiky";
  }
  return "?";
}

WobbleMode parse_wobble_mode(std::string_view text) {
  if (text == "radial" || text == "i") return WobbleMode::kRadial;
  if (text == "alternating" || text == "ii") return WobbleMode::kAlternating;
  if (text == "spiky" || text == "iii") return WobbleMode::kSpiky;
  throw ConfigError("unknown wobble mode '" + std::string(text) + "'");
}

double inradius_estimate(const PlanarDomain& d) {
  double r = 0.0;
  grid_center(d, &r);
  return r;
}

DomainSequence gen_wobble_sequence(const PlanarDomain& limit, const AmplitudeLaw& amplitude,
                                   WobbleMode mode, std::uint64_t seed, int harmonic,
                                   std::optional<Point> star_center, int check_count) {
  double inradius = 0.0;
  const Point center_guess = grid_center(limit, &inradius);
  const Point center = star_center.value_or(center_guess);
  AmplitudeLaw law = amplitude;
  if (mode == WobbleMode::kSpiky && !(law.spike_scale > 0.0)) law.spike_scale = 4.0;
  if (mode != WobbleMode::kSpiky) law.spike_scale = 0.0;
  for (int n = 1; n <= check_count; ++n) {
    const double a = law(n);
    if (!(a > 0.0) || !(a < 0.5 * inradius)) {
      throw GeneratorError("amplitude a(" + std::to_string(n) + ") = " + format_number(a) +
                           " is not below half the inradius " + format_number(inradius));
    }
  }
  if (mode == WobbleMode::kRadial && !(limit.signed_distance(center) > 0.0)) {
    throw GeneratorError("star center lies outside the limit domain");
  }
  DomainSequence::Generator gen;
  if (mode == WobbleMode::kRadial) {
    gen = [limit, law, seed, harmonic, center](int n) {
      const double a = law(n);
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      const double phase = seeded_phase(seed, n);
      std::vector<Point> pts = limit.densified_boundary();
      for (Point& v : pts) {
        const Point d = v - center;
        const double r = std::abs(d);
        const double shift = sign * a * std::sin(harmonic * std::arg(d) + phase);
        v = center + d * ((r + shift) / r);
      }
      try {
        return PlanarDomain(std::move(pts), limit.resolution());
      } catch (const GeometryError& e) {
        throw GeneratorError("wobbled polygon " + std::to_string(n) + " is not simple: " + e.what());
      }
    };
  } else {
    gen = [limit, law](int n) {
      const double a = law(n);
      if (n % 2 == 0) return envelope(limit, a);
      ErosionResult e = erode(limit, a);
      if (e.status != ErosionResult::Status::kConnected) {
        throw GeneratorError("erosion " + std::to_string(n) + " is not connected");
      }
      return std::move(*e.domain);
    };
  }
  return DomainSequence(SequenceRole::kWobble, std::string("wobble-") + wobble_mode_name(mode),
                        std::move(gen), limit);
}

void validate_generated(const DomainSequence& s, int count) {
  try {
    s.validate(count);
  } catch (const SequenceError& e) {
    throw GeneratorError(std::string("generated sequence fails its role invariants: ") + e.what());
  }
}

MonotoneSequences gen_monotone_sequences(const PlanarDomain& d, int n0, int count) {
  if (n0 < 1) throw ConfigError("N0 must be positive");
  if (count < 1) throw ConfigError("sequence count must be positive");
  int chosen = 0;
  for (int N = n0; N <= 1000 && chosen == 0; ++N) {
    bool ok = true;
    for (int n = 1; n <= count && ok; ++n) {
      ok = erode(d, 1.0 / (N + n)).status == ErosionResult::Status::kConnected;
    }
    if (ok) chosen = N;
  }
  if (chosen == 0) throw GeneratorError("no N0 up to 1000 gives connected erosions");
  const int N = chosen;
  DomainSequence interior(
      SequenceRole::kInterior, "erosion", [d, N](int n) { return *erode(d, 1.0 / (N + n)).domain; }, d);
  DomainSequence exterior(
      SequenceRole::kExterior, "envelope", [d, N](int n) { return envelope(d, 1.0 / (N + n)); }, d);
  validate_generated(interior, count);
  validate_generated(exterior, count);
  return MonotoneSequences{std::move(interior), std::move(exterior), n0, N, N != n0};
}

DomainSequence gen_hyperconvex_exterior(Point center, double radius, double resolution,
                                        double limit_resolution) {
  if (!(radius > 0.0)) throw ConfigError("hyperconvex radius must be positive");
  return DomainSequence(
      SequenceRole::kExterior, "hyperconvex",
      [center, radius, resolution](int k) {
        return make_disc_polygon(center, radius * std::sqrt(1.0 + 1.0 / k), resolution);
      },
      make_disc_polygon(center, radius, limit_resolution));
}

std::optional<Point> witness_outside(const PlanarDomain& a, const PlanarDomain& b) {
  const std::vector<Point> samples = a.densified_boundary();
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double s = b.signed_distance(samples[i]);
    if (s < 0.0) order.emplace_back(s, i);
  }
  std::sort(order.begin(), order.end());
  if (order.size() > 32) order.resize(32);
  for (const auto& [depth, i] : order) {
    const Point x = samples[i];
    // Points on the segment from x to its nearest point of closure(B) stay
    // outside B; look for one inside A.
    const Point q = b.nearest_boundary_point(x);
    for (double t : {0.5, 0.25, 0.75, 0.125, 0.875}) {
      const Point p = x + t * (q - x);
      if (a.signed_distance(p) > 0.0 && b.signed_distance(p) < 0.0) return p;
    }
    // Otherwise step into A along the local inward direction.
    const double step = 0.5 * std::min(-depth, a.resolution());
    for (int k = 0; k < 16; ++k) {
      const Point p = x + std::polar(step, kTwoPi * k / 16);
      if (a.signed_distance(p) > 0.0 && b.signed_distance(p) < 0.0) return p;
    }
  }
  return std::nullopt;
}

std::vector<MonotonicityWitness> monotonicity_witnesses(const DomainSequence& s, int count) {
  std::vector<MonotonicityWitness> out;
  for (int n = 1; n < count; ++n) {
    MonotonicityWitness w;
    w.n = n;
    if (auto p = witness_outside(s.at(n), s.at(n + 1))) w.in_n_not_next = PointN{*p};
    if (auto p = witness_outside(s.at(n + 1), s.at(n))) w.in_next_not_n = PointN{*p};
    out.push_back(std::move(w));
  }
  return out;
}

int pair_entry_index(const DomainSequence& s, Point z, Point w, int count) {
  const Point pts[2] = {z, w};
  int entry = 0;
  for (int n = count; n >= 1; --n) {
    if (!contains_compact(s.at(n), pts)) break;
    entry = n;
  }
  return entry;
}

// --- Configuration ----------------------------------------------------------

namespace {

// Object view that rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& at(const char* key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(path_ + ": missing '" + key + "'");
    return j_.at(key);
  }

  template <class T>
  T get(const char* key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (used_.count(item.key()) == 0) {
        throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Point parse_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(path + ": expected [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

// [re, im] for a planar point or [[re, im], ...] for a point of C^n.
PointN parse_point_n(const json& j, const std::string& path) {
  if (j.is_array() && !j.empty() && j[0].is_array()) {
    PointN out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(parse_point(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
  }
  return {parse_point(j, path)};
}

json point_json(Point p) { return json::array({p.real(), p.imag()}); }

json point_n_json(const PointN& p) {
  if (p.size() == 1) return point_json(p[0]);
  json a = json::array();
  for (const Point& c : p) a.push_back(point_json(c));
  return a;
}

void parse_caratheodory(const json& j, CaratheodoryOptions& o) {
  Fields f(j, "solver.caratheodory");
  o.degree = f.get("degree", o.degree);
  o.poles_per_corner = f.get("poles_per_corner", o.poles_per_corner);
  o.lawson_iterations = f.get("lawson_iterations", o.lawson_iterations);
  o.sample_spacing = f.get("sample_spacing", o.sample_spacing);
  o.certify_samples = f.get("certify_samples", o.certify_samples);
  o.random_starts = f.get("random_starts", o.random_starts);
  o.seed = f.get("seed", o.seed);
  f.finish();
}

void parse_lempert(const json& j, LempertOptions& o) {
  Fields f(j, "solver.lempert");
  o.degree = f.get("degree", o.degree);
  o.optimize_samples = f.get("optimize_samples", o.optimize_samples);
  o.verify_samples = f.get("verify_samples", o.verify_samples);
  o.max_inner_iterations = f.get("max_inner_iterations", o.max_inner_iterations);
  o.bisection_steps = f.get("bisection_steps", o.bisection_steps);
  o.target_margin = f.get("target_margin", o.target_margin);
  o.model_target_margin = f.get("model_target_margin", o.model_target_margin);
  o.poles_per_corner = f.get("poles_per_corner", o.poles_per_corner);
  o.seed = f.get("seed", o.seed);
  f.finish();
}

System parse_system_json(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a system code");
  try {
    return parse_system(j.get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string system_string(System s) { return std::string(1, system_code(s)); }

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Fields root(j, "config");
  c.version = root.get("version", 0);
  if (c.version != 1) throw ConfigError("config: unsupported version " + std::to_string(c.version));
  c.name = root.get<std::string>("name", "");

  {
    Fields f(root.at("limit"), "limit");
    LimitSpec& l = c.limit;
    l.shape = f.get<std::string>("shape", l.shape);
    l.resolution = f.get("resolution", l.resolution);
    l.size = f.get("size", l.size);
    if (f.has("center")) l.center = parse_point(f.at("center"), f.path("center"));
    if (f.has("vertices")) {
      const json& v = f.at("vertices");
      if (!v.is_array()) throw ConfigError("limit.vertices: expected an array");
      for (std::size_t i = 0; i < v.size(); ++i) {
        l.vertices.push_back(parse_point(v[i], "limit.vertices[" + std::to_string(i) + "]"));
      }
    }
    l.dim = f.get("dim", l.dim);
    if (f.has("star_center")) l.star_center = parse_point(f.at("star_center"), f.path("star_center"));
    f.finish();
    static const std::set<std::string> shapes{"square", "l_shape", "disc", "polygon", "ball", "polydisc"};
    if (shapes.count(l.shape) == 0) throw ConfigError("limit.shape: unknown shape '" + l.shape + "'");
    if (!(l.resolution > 0.0) || !(l.size > 0.0)) {
      throw ConfigError("limit: resolution and size must be positive");
    }
  }

  {
    Fields f(root.at("sequence"), "sequence");
    SequenceSpec& s = c.sequence;
    s.generator = f.get<std::string>("generator", s.generator);
    s.mode = parse_wobble_mode(f.get<std::string>("mode", wobble_mode_name(s.mode)));
    if (f.has("amplitude")) {
      Fields a(f.at("amplitude"), "sequence.amplitude");
      s.amplitude.scale = a.get("scale", s.amplitude.scale);
      s.amplitude.shift = a.get("shift", s.amplitude.shift);
      s.amplitude.power = a.get("power", s.amplitude.power);
      s.amplitude.spike_scale = a.get("spike_scale", s.amplitude.spike_scale);
      a.finish();
    }
    s.seed = f.get("seed", s.seed);
    s.harmonic = f.get("harmonic", s.harmonic);
    s.n0 = f.get("N0", s.n0);
    s.side = f.get<std::string>("side", s.side);
    s.resolution = f.get("resolution", s.resolution);
    f.finish();
    static const std::set<std::string> gens{"wobble", "monotone", "hyperconvex", "affine_ball"};
    if (gens.count(s.generator) == 0) {
      throw ConfigError("sequence.generator: unknown generator '" + s.generator + "'");
    }
    if (s.side != "interior" && s.side != "exterior") {
      throw ConfigError("sequence.side: expected interior or exterior");
    }
  }

  {
    const json& p = root.at("pairs");
    if (!p.is_array() || p.empty()) throw ConfigError("pairs: expected a nonempty array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string at = "pairs[" + std::to_string(i) + "]";
      Fields f(p[i], at);
      PointPair pair{parse_point_n(f.at("z"), at + ".z"), parse_point_n(f.at("w"), at + ".w")};
      f.finish();
      if (pair.z.size() != pair.w.size()) throw ConfigError(at + ": z and w differ in dimension");
      c.pairs.push_back(std::move(pair));
    }
  }

  {
    const json& s = root.at("systems");
    if (!s.is_array() || s.empty()) throw ConfigError("systems: expected a nonempty array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.systems.push_back(parse_system_json(s[i], "systems[" + std::to_string(i) + "]"));
    }
  }

  c.depth = root.get("depth", c.depth);
  if (c.depth < 1) throw ConfigError("depth must be positive");
  c.evaluate_from = root.get("evaluate_from", c.evaluate_from);
  if (root.has("final_window")) {
    const json& w = root.at("final_window");
    if (!w.is_array() || w.size() != 2) throw ConfigError("final_window: expected [first, last]");
    c.final_window = {w[0].get<int>(), w[1].get<int>()};
  } else {
    c.final_window = {c.depth - c.depth / 4, c.depth};
  }
  if (c.final_window.first < 1 || c.final_window.first > c.final_window.second ||
      c.final_window.second > c.depth) {
    throw ConfigError("final_window must lie inside [1, depth]");
  }
  if (c.evaluate_from < 1 || c.evaluate_from > c.final_window.first) {
    throw ConfigError("evaluate_from must lie in [1, final_window first]");
  }
  c.tolerance = root.get("tolerance", c.tolerance);

  if (root.has("solver")) {
    Fields f(root.at("solver"), "solver");
    if (f.has("caratheodory")) parse_caratheodory(f.at("caratheodory"), c.solver.caratheodory);
    if (f.has("lempert")) parse_lempert(f.at("lempert"), c.solver.lempert);
    c.solver.segment_waypoints = f.get("segment_waypoints", c.solver.segment_waypoints);
    c.solver.certify_tolerance = f.get("certify_tolerance", c.solver.certify_tolerance);
    c.solver.green_conformal = f.get("green_conformal", c.solver.green_conformal);
    f.finish();
  }

  if (root.has("sandwich")) {
    Fields f(root.at("sandwich"), "sandwich");
    SandwichSpec& s = c.sandwich;
    s.enabled = f.get("enabled", s.enabled);
    s.n0 = f.get("N0", s.n0);
    s.depth = f.get("depth", s.depth);
    s.search_cap = f.get("search_cap", s.search_cap);
    if (f.has("system")) s.system = parse_system_json(f.at("system"), "sandwich.system");
    f.finish();
  }
  c.output_dir = root.get<std::string>("output_dir", c.output_dir);
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["version"] = c.version;
  j["name"] = c.name;
  json limit{{"shape", c.limit.shape},
             {"resolution", c.limit.resolution},
             {"size", c.limit.size},
             {"center", point_json(c.limit.center)},
             {"dim", c.limit.dim}};
  if (!c.limit.vertices.empty()) {
    json v = json::array();
    for (const Point& p : c.limit.vertices) v.push_back(point_json(p));
    limit["vertices"] = v;
  }
  if (c.limit.star_center) limit["star_center"] = point_json(*c.limit.star_center);
  j["limit"] = limit;
  j["sequence"] = {{"generator", c.sequence.generator},
                   {"mode", wobble_mode_name(c.sequence.mode)},
                   {"amplitude",
                    {{"scale", c.sequence.amplitude.scale},
                     {"shift", c.sequence.amplitude.shift},
                     {"power", c.sequence.amplitude.power},
                     {"spike_scale", c.sequence.amplitude.spike_scale}}},
                   {"seed", c.sequence.seed},
                   {"harmonic", c.sequence.harmonic},
                   {"N0", c.sequence.n0},
                   {"side", c.sequence.side},
                   {"resolution", c.sequence.resolution}};
  json pairs = json::array();
  for (const PointPair& p : c.pairs) pairs.push_back({{"z", point_n_json(p.z)}, {"w", point_n_json(p.w)}});
  j["pairs"] = pairs;
  json systems = json::array();
  for (System s : c.systems) systems.push_back(system_string(s));
  j["systems"] = systems;
  j["depth"] = c.depth;
  j["evaluate_from"] = c.evaluate_from;
  j["final_window"] = {c.final_window.first, c.final_window.second};
  j["tolerance"] = c.tolerance;
  const CaratheodoryOptions& co = c.solver.caratheodory;
  const LempertOptions& lo = c.solver.lempert;
  j["solver"] = {{"caratheodory",
                  {{"degree", co.degree},
                   {"poles_per_corner", co.poles_per_corner},
                   {"lawson_iterations", co.lawson_iterations},
                   {"sample_spacing", co.sample_spacing},
                   {"certify_samples", co.certify_samples},
                   {"random_starts", co.random_starts},
                   {"seed", co.seed}}},
                 {"lempert",
                  {{"degree", lo.degree},
                   {"optimize_samples", lo.optimize_samples},
                   {"verify_samples", lo.verify_samples},
                   {"max_inner_iterations", lo.max_inner_iterations},
                   {"bisection_steps", lo.bisection_steps},
                   {"target_margin", lo.target_margin},
                   {"model_target_margin", lo.model_target_margin},
                   {"poles_per_corner", lo.poles_per_corner},
                   {"seed", lo.seed}}},
                 {"segment_waypoints", c.solver.segment_waypoints},
                 {"certify_tolerance", c.solver.certify_tolerance},
                 {"green_conformal", c.solver.green_conformal}};
  j["sandwich"] = {{"enabled", c.sandwich.enabled},
                   {"N0", c.sandwich.n0},
                   {"depth", c.sandwich.depth},
                   {"search_cap", c.sandwich.search_cap},
                   {"system", system_string(c.sandwich.system)}};
  j["output_dir"] = c.output_dir;
  return j;
}

// --- Experiments ------------------------------------------------------------

namespace {

PlanarDomain planar_limit(const LimitSpec& l) {
  const double res = l.resolution;
  if (l.shape == "square") return make_square(l.size, res / l.size).transformed(1.0, l.center);
  if (l.shape == "l_shape") return make_l_shape(res / l.size).transformed(l.size, l.center);
  if (l.shape == "disc") return make_disc_polygon(l.center, l.size, res);
  if (l.vertices.size() < 3) throw ConfigError("limit.vertices: a polygon needs 3 or more vertices");
  return PlanarDomain(l.vertices, res);
}

ModelDomain model_limit(const LimitSpec& l) {
  if (l.dim < 1) throw ConfigError("limit.dim must be positive");
  const auto dim = static_cast<std::size_t>(l.dim);
  if (l.shape == "ball") return ModelDomain::ball(dim, PointN(dim, 0.0), l.size);
  return ModelDomain::polydisc(PointN(dim, 0.0), std::vector<double>(dim, l.size));
}

bool is_model(const LimitSpec& l) { return l.shape == "ball" || l.shape == "polydisc"; }

AmplitudeLaw effective_law(const SequenceSpec& s) {
  AmplitudeLaw law = s.amplitude;
  if (s.mode == WobbleMode::kSpiky && !(law.spike_scale > 0.0)) law.spike_scale = 4.0;
  if (s.mode != WobbleMode::kSpiky) law.spike_scale = 0.0;
  return law;
}

// Diagonal stretch (1 + s a, 1 - s a, ...) with s = (-1)^n.
std::vector<double> affine_axes(int n, double a, std::size_t dim) {
  std::vector<double> axes(dim);
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < dim; ++i) axes[i] = 1.0 + (i % 2 == 0 ? sign : -sign) * a;
  return axes;
}

struct Setup {
  Domain limit = ModelDomain::disc();
  std::optional<DomainSequence> sequence;
  std::vector<ModelDomain> models;  // index n - 1
  std::vector<std::vector<double>> axes;

  Domain at(int n) const {
    if (sequence) return sequence->at(n);
    return models[static_cast<std::size_t>(n - 1)];
  }
};

bool pair_inside(const Domain& d, const PointPair& p, double res) {
  if (const PlanarDomain* q = std::get_if<PlanarDomain>(&d)) {
    const Point pts[2] = {p.z[0], p.w[0]};
    return contains_compact(*q, pts);
  }
  const ModelDomain& m = std::get<ModelDomain>(d);
  return m.normalized_margin(p.z) > 2.0 * res && m.normalized_margin(p.w) > 2.0 * res;
}

// Builds and materializes the sequence and runs every hypothesis check;
// throws before any solver runs.
Setup prepare(const ExperimentConfig& c, ConvergenceReport& r) {
  const int depth = c.depth;
  const SequenceSpec& spec = c.sequence;
  Setup s;
  r.hausdorff.assign(static_cast<std::size_t>(depth), 0.0);
  r.amplitude.assign(static_cast<std::size_t>(depth), 0.0);
  if (is_model(c.limit)) {
    if (spec.generator != "affine_ball") {
      throw ConfigError("model limits need the affine_ball generator");
    }
    const ModelDomain limit = model_limit(c.limit);
    s.limit = limit;
    const AmplitudeLaw law = spec.amplitude;
    for (int n = 1; n <= depth; ++n) {
      const double a = law(n);
      if (!(a > 0.0) || !(a < 0.5)) {
        throw GeneratorError("affine amplitude a(" + std::to_string(n) + ") must lie in (0, 0.5)");
      }
      const std::vector<double> axes = affine_axes(n, a, limit.dim());
      std::vector<std::complex<double>> m(limit.dim() * limit.dim(), 0.0);
      for (std::size_t i = 0; i < limit.dim(); ++i) m[i * limit.dim() + i] = axes[i];
      s.models.push_back(limit.affine_image(m, PointN(limit.dim(), 0.0)));
      s.axes.push_back(axes);
      // Hausdorff distance of concentric images of the model body.
      double out = 0.0, in = 0.0, worst = 0.0;
      for (double ax : axes) {
        const double d = (ax - 1.0) * c.limit.size;
        out += d > 0.0 ? d * d : 0.0;
        in += d < 0.0 ? d * d : 0.0;
        worst = std::max(worst, std::abs(d));
      }
      r.hausdorff[static_cast<std::size_t>(n - 1)] =
          c.limit.shape == "ball" ? worst : std::sqrt(std::max(out, in));
      r.amplitude[static_cast<std::size_t>(n - 1)] = a;
    }
  } else {
    const PlanarDomain limit = planar_limit(c.limit);
    s.limit = limit;
    if (spec.generator == "wobble") {
      const AmplitudeLaw law = effective_law(spec);
      s.sequence = gen_wobble_sequence(limit, law, spec.mode, spec.seed, spec.harmonic,
                                       c.limit.star_center, depth);
      for (int n = 1; n <= depth; ++n) r.amplitude[static_cast<std::size_t>(n - 1)] = law(n);
    } else if (spec.generator == "monotone") {
      MonotoneSequences m = gen_monotone_sequences(limit, spec.n0, depth);
      if (m.raised) {
        r.notes.push_back("N0 raised from " + std::to_string(m.requested_n0) + " to " +
                          std::to_string(m.n0) + " for connected erosions");
      }
      s.sequence = spec.side == "interior" ? std::move(m.interior) : std::move(m.exterior);
      for (int n = 1; n <= depth; ++n) r.amplitude[static_cast<std::size_t>(n - 1)] = 1.0 / (m.n0 + n);
    } else if (spec.generator == "hyperconvex") {
      if (c.limit.shape != "disc") throw ConfigError("the hyperconvex generator needs a disc limit");
      const double res = spec.resolution > 0.0 ? spec.resolution : c.limit.resolution;
      s.sequence = gen_hyperconvex_exterior(c.limit.center, c.limit.size, res, c.limit.resolution);
      validate_generated(*s.sequence, depth);
      for (int n = 1; n <= depth; ++n) {
        r.amplitude[static_cast<std::size_t>(n - 1)] = c.limit.size * (std::sqrt(1.0 + 1.0 / n) - 1.0);
      }
    } else {
      throw ConfigError("the affine_ball generator needs a ball or polydisc limit");
    }
    for (int n = 1; n <= depth; ++n) {
      s.sequence->at(n);
      r.hausdorff[static_cast<std::size_t>(n - 1)] = s.sequence->hausdorff_to_limit(n);
    }
    if (spec.generator == "wobble") {
      try {
        s.sequence->validate(depth);
      } catch (const SequenceError& e) {
        throw HypothesisError(std::string("Hausdorff convergence to the limit is not observed: ") + e.what());
      }
    }
  }

  // Eventual compact containment of every pair.
  const std::size_t dim = domain_dim(s.limit);
  r.entry_index.assign(c.pairs.size(), 0);
  for (std::size_t pid = 0; pid < c.pairs.size(); ++pid) {
    const PointPair& p = c.pairs[pid];
    const std::string tag = "pair " + std::to_string(pid);
    if (p.z.size() != dim) throw ConfigError(tag + " does not match the domain dimension");
    if (!pair_inside(s.limit, p, c.limit.resolution)) {
      throw HypothesisError(tag + " is not compactly inside the limit domain");
    }
    int entry = 0;
    for (int n = depth; n >= 1 && pair_inside(s.at(n), p, c.limit.resolution); --n) entry = n;
    r.entry_index[pid] = entry;
    if (entry == 0 || entry > c.final_window.first) {
      throw HypothesisError(tag + " is not eventually contained: entry index " +
                            (entry == 0 ? std::string("none") : std::to_string(entry)) +
                            " after the window start " + std::to_string(c.final_window.first));
    }
  }

  // Non-monotonicity witnesses.
  if (s.sequence) {
    r.witnesses = monotonicity_witnesses(*s.sequence, depth);
  } else {
    for (int n = 1; n < depth; ++n) {
      MonotonicityWitness w;
      w.n = n;
      const auto& a = s.axes[static_cast<std::size_t>(n - 1)];
      const auto& b = s.axes[static_cast<std::size_t>(n)];
      for (std::size_t i = 0; i < dim; ++i) {
        PointN p(dim, 0.0);
        p[i] = 0.5 * (a[i] + b[i]) * c.limit.size;
        const Domain dn = s.models[static_cast<std::size_t>(n - 1)];
        const Domain dm = s.models[static_cast<std::size_t>(n)];
        const bool in_n = domain_margin(dn, p) > 0.0;
        const bool in_m = domain_margin(dm, p) > 0.0;
        if (in_n && !in_m && !w.in_n_not_next) w.in_n_not_next = p;
        if (in_m && !in_n && !w.in_next_not_n) w.in_next_not_n = p;
      }
      r.witnesses.push_back(std::move(w));
    }
  }
  for (const MonotonicityWitness& w : r.witnesses) {
    if (w.in_n_not_next) r.last_not_increasing = w.n;
    if (w.in_next_not_n) r.last_not_decreasing = w.n;
  }
  return s;
}

std::vector<MetricEstimate> limit_values(const ExperimentConfig& c, const Setup& s) {
  std::vector<MetricEstimate> out;
  for (const PointPair& p : c.pairs) {
    if (const PlanarDomain* d = std::get_if<PlanarDomain>(&s.limit)) {
      const RiemannMap map = RiemannMap::build(*d, p.z[0]);
      for (System sys : c.systems) out.push_back(pullback_metric(map, p.z[0], p.w[0], sys));
    } else {
      for (System sys : c.systems) out.push_back(estimate_system(s.limit, p.z, p.w, sys, c.solver));
    }
  }
  return out;
}

void run_sandwich_part(const ExperimentConfig& c, const Setup& s, ConvergenceReport& r) {
  if (!s.sequence || s.sequence->role() != SequenceRole::kWobble) {
    throw ConfigError("the sandwich needs a planar wobble sequence");
  }
  const PlanarDomain& limit = s.sequence->limit();
  MonotoneSequences m = gen_monotone_sequences(limit, c.sandwich.n0, c.sandwich.depth + 1);
  if (m.raised) {
    r.notes.push_back("sandwich N0 raised from " + std::to_string(m.requested_n0) + " to " +
                      std::to_string(m.n0));
  }
  r.sandwich = build_sandwich(m.interior, m.exterior, *s.sequence, c.sandwich.depth,
                              c.sandwich.search_cap);
  r.sandwich_reverify_failures =
      reverify_certificate(*r.sandwich, *s.sequence, 0.5 * limit.resolution());
  std::vector<std::pair<Point, Point>> pairs;
  for (const PointPair& p : c.pairs) pairs.emplace_back(p.z[0], p.w[0]);
  r.sandwich_report = evaluate_sandwich(*r.sandwich, *s.sequence, pairs, c.sandwich.system, c.solver);
}

void finish(ConvergenceReport& r) {
  bool ok = r.aborted.empty();
  for (const ConvergenceRow& row : r.rows) ok = ok && row.pass;
  for (const ConvergenceSummary& sm : r.summary) ok = ok && sm.pass;
  if (r.sandwich_report) ok = ok && r.sandwich_report->failures == 0;
  ok = ok && r.sandwich_reverify_failures.empty();
  r.all_pass = ok;
}

}  // namespace

ConvergenceReport run_convergence_experiment(const ExperimentConfig& config) {
  ConvergenceReport r;
  r.config = config;
  const Setup s = prepare(config, r);
  r.limit_values = limit_values(config, s);

  struct Cell {
    int n;
    std::size_t pid;
    std::size_t sid;
  };
  std::vector<Cell> cells;
  for (int n = config.evaluate_from; n <= config.depth; ++n) {
    for (std::size_t pid = 0; pid < config.pairs.size(); ++pid) {
      if (n < r.entry_index[pid]) continue;
      for (std::size_t sid = 0; sid < config.systems.size(); ++sid) cells.push_back({n, pid, sid});
    }
  }
  std::vector<ConvergenceRow> rows(cells.size());
  const auto count = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    const Cell& cell = cells[static_cast<std::size_t>(i)];
    ConvergenceRow& row = rows[static_cast<std::size_t>(i)];
    row.n = cell.n;
    row.pair_id = cell.pid;
    row.system = config.systems[cell.sid];
    row.estimate.system = row.system;
    try {
      const PointPair& p = config.pairs[cell.pid];
      row.estimate = estimate_system(s.at(cell.n), p.z, p.w, row.system, config.solver);
    } catch (const Error& e) {
      row.error = e.what();
    }
  }

  const double tol = config.tolerance;
  for (ConvergenceRow& row : rows) {
    const MetricEstimate& lim = r.limit_values[row.pair_id * config.systems.size() +
                                               static_cast<std::size_t>(std::find(config.systems.begin(), config.systems.end(), row.system) -
                                                                        config.systems.begin())];
    row.limit_lower = lim.lower;
    row.limit_upper = lim.upper;
    row.hausdorff = r.hausdorff[static_cast<std::size_t>(row.n - 1)];
    row.gap = std::abs(row.estimate.midpoint() - lim.midpoint());
    row.certified_gap = std::max(row.estimate.upper - lim.lower, lim.upper - row.estimate.lower);
    row.in_window = row.n >= config.final_window.first && row.n <= config.final_window.second;
    const bool consistent = row.error.empty() && row.estimate.lower <= row.estimate.upper;
    row.pass = consistent && (!row.in_window || row.gap < tol);
    if (!row.error.empty() && r.aborted.empty()) {
      r.aborted = "n=" + std::to_string(row.n) + " pair " + std::to_string(row.pair_id) + ": " + row.error;
    }
  }
  r.rows = std::move(rows);

  for (std::size_t pid = 0; pid < config.pairs.size(); ++pid) {
    for (System sys : config.systems) {
      ConvergenceSummary sm;
      sm.pair_id = pid;
      sm.system = sys;
      int judged = 0;
      for (const ConvergenceRow& row : r.rows) {
        if (row.pair_id != pid || row.system != sys) continue;
        if (row.hausdorff > 0.0) sm.rate_constant = std::max(sm.rate_constant, row.gap / row.hausdorff);
        if (!row.in_window) continue;
        ++judged;
        sm.max_window_gap = std::max(sm.max_window_gap, row.gap);
        sm.max_window_certified_gap = std::max(sm.max_window_certified_gap, row.certified_gap);
        sm.pass = sm.pass && row.pass;
      }
      sm.pass = sm.pass && judged > 0 && sm.max_window_gap < tol;
      r.summary.push_back(sm);
    }
  }

  if (config.sandwich.enabled) {
    try {
      run_sandwich_part(config, s, r);
    } catch (const Error& e) {
      r.aborted = std::string("sandwich: ") + e.what();
    }
  }
  finish(r);
  return r;
}

ConvergenceReport run_sandwich_experiment(const ExperimentConfig& config) {
  ConvergenceReport r;
  r.config = config;
  const Setup s = prepare(config, r);
  try {
    run_sandwich_part(config, s, r);
  } catch (const Error& e) {
    r.aborted = std::string("sandwich: ") + e.what();
  }
  finish(r);
  return r;
}

// --- Output -----------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string report_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "n,pair_id,system,lower,upper,limit_lower,limit_upper,hausdorff,gap,pass\n";
  for (const ConvergenceRow& row : r.rows) {
    out << row.n << ',' << row.pair_id << ',' << system_code(row.system) << ','
        << format_number(row.estimate.lower) << ',' << format_number(row.estimate.upper) << ','
        << format_number(row.limit_lower) << ',' << format_number(row.limit_upper) << ','
        << format_number(row.hausdorff) << ',' << format_number(row.gap) << ','
        << (row.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string plot_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "n,pair_id,system,midpoint,half_width,limit_midpoint,limit_half_width,hausdorff,amplitude\n";
  for (const ConvergenceRow& row : r.rows) {
    const double lim_mid = 0.5 * (row.limit_lower + row.limit_upper);
    out << row.n << ',' << row.pair_id << ',' << system_code(row.system) << ','
        << format_number(row.estimate.midpoint()) << ','
        << format_number(0.5 * row.estimate.gap()) << ',' << format_number(lim_mid) << ','
        << format_number(0.5 * (row.limit_upper - row.limit_lower)) << ','
        << format_number(row.hausdorff) << ','
        << format_number(r.amplitude[static_cast<std::size_t>(row.n - 1)]) << '\n';
  }
  return out.str();
}

std::string sandwich_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "n,d_index,pair_id,u_lower,u_upper,d_lower,d_upper,l_lower,l_upper,chain_holds\n";
  if (!r.sandwich_report) return out.str();
  for (const SandwichRow& row : r.sandwich_report->rows) {
    out << row.n << ',' << row.d_index << ',' << row.pair_id << ','
        << format_number(row.upper_domain.lower) << ',' << format_number(row.upper_domain.upper) << ','
        << format_number(row.sequence_domain.lower) << ','
        << format_number(row.sequence_domain.upper) << ','
        << format_number(row.lower_domain.lower) << ',' << format_number(row.lower_domain.upper)
        << ',' << (row.chain_holds ? "true" : "false") << '\n';
  }
  return out.str();
}

namespace {

json estimate_json(const MetricEstimate& e) {
  json j{{"system", std::string(1, system_code(e.system))},
         {"lower", format_number(e.lower)},
         {"upper", format_number(e.upper)},
         {"width", format_number(e.gap())},
         {"slack", format_number(e.slack)},
         {"certified", e.certified},
         {"lower_provenance", e.lower_provenance},
         {"upper_provenance", e.upper_provenance},
         {"notes", e.notes}};
  if (e.exact) j["exact"] = format_number(*e.exact);
  return j;
}

json witness_point(const std::optional<PointN>& p) {
  if (!p) return nullptr;
  return point_n_json(*p);
}

}  // namespace

json report_json(const ConvergenceReport& r) {
  json j;
  j["format"] = "imlab.convergence_report";
  j["version"] = 1;
  j["config"] = to_json(r.config);
  json geo = json::array();
  for (std::size_t i = 0; i < r.hausdorff.size(); ++i) {
    geo.push_back({{"n", i + 1},
                   {"hausdorff", format_number(r.hausdorff[i])},
                   {"amplitude", format_number(r.amplitude[i])}});
  }
  j["sequence"] = geo;
  j["entry_index"] = r.entry_index;
  json limits = json::array();
  for (const MetricEstimate& e : r.limit_values) limits.push_back(estimate_json(e));
  j["limit_values"] = limits;
  json wit = json::array();
  for (const MonotonicityWitness& w : r.witnesses) {
    wit.push_back({{"n", w.n},
                   {"in_n_not_next", witness_point(w.in_n_not_next)},
                   {"in_next_not_n", witness_point(w.in_next_not_n)}});
  }
  j["monotonicity_witnesses"] = wit;
  j["last_not_increasing"] = r.last_not_increasing;
  j["last_not_decreasing"] = r.last_not_decreasing;
  json rows = json::array();
  for (const ConvergenceRow& row : r.rows) {
    json e{{"n", row.n},
           {"pair_id", row.pair_id},
           {"estimate", estimate_json(row.estimate)},
           {"limit_lower", format_number(row.limit_lower)},
           {"limit_upper", format_number(row.limit_upper)},
           {"hausdorff", format_number(row.hausdorff)},
           {"gap", format_number(row.gap)},
           {"certified_gap", format_number(row.certified_gap)},
           {"in_window", row.in_window},
           {"pass", row.pass}};
    if (!row.error.empty()) e["error"] = row.error;
    rows.push_back(e);
  }
  j["rows"] = rows;
  json summary = json::array();
  for (const ConvergenceSummary& s : r.summary) {
    summary.push_back({{"pair_id", s.pair_id},
                       {"system", std::string(1, system_code(s.system))},
                       {"max_window_gap", format_number(s.max_window_gap)},
                       {"max_window_certified_gap", format_number(s.max_window_certified_gap)},
                       {"rate_constant", format_number(s.rate_constant)},
                       {"pass", s.pass}});
  }
  j["summary"] = summary;
  if (r.sandwich) {
    j["sandwich_certificate"] = to_json(*r.sandwich);
    j["sandwich_reverify_failures"] = r.sandwich_reverify_failures;
  }
  if (r.sandwich_report) {
    json srows = json::array();
    for (const SandwichRow& row : r.sandwich_report->rows) {
      srows.push_back({{"n", row.n},
                       {"d_index", row.d_index},
                       {"pair_id", row.pair_id},
                       {"U", estimate_json(row.upper_domain)},
                       {"D", estimate_json(row.sequence_domain)},
                       {"L", estimate_json(row.lower_domain)},
                       {"chain_holds", row.chain_holds},
                       {"failure", row.failure}});
    }
    j["sandwich_rows"] = srows;
    j["sandwich_entry_index"] = r.sandwich_report->entry_index;
    j["sandwich_failures"] = r.sandwich_report->failures;
  }
  j["notes"] = r.notes;
  j["aborted"] = r.aborted;
  j["all_pass"] = r.all_pass;
  return j;
}

PlanarDomain polygon_from_json(const json& j) {
  const json* v = &j;
  double res = kDefaultResolution;
  if (j.is_object()) {
    Fields f(j, "polygon");
    v = &f.at("vertices");
    res = f.get("resolution", res);
    f.finish();
  }
  if (!v->is_array() || v->size() < 3) throw ConfigError("polygon: expected 3 or more vertices");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < v->size(); ++i) {
    pts.push_back(parse_point((*v)[i], "polygon.vertices[" + std::to_string(i) + "]"));
  }
  return PlanarDomain(std::move(pts), res);
}

json polygon_to_json(const PlanarDomain& d) {
  json v = json::array();
  for (const Point& p : d.vertices()) v.push_back(point_json(p));
  return {{"vertices", v}, {"resolution", d.resolution()}};
}

PlanarDomain load_polygon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open polygon file '" + path + "'");
  try {
    return polygon_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("polygon file '" + path + "' is not valid JSON: " + e.what());
  }
}

void write_report(const ConvergenceReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + name + " in '" + dir + "'");
    out << text;
  };
  if (!r.rows.empty() || !r.sandwich) {
    write("report.csv", report_csv(r));
    write("plot_data.csv", plot_csv(r));
  }
  write("report.json", report_json(r).dump(2) + "\n");
  if (r.sandwich) {
    write("sandwich.json", to_json(*r.sandwich).dump(2) + "\n");
    write("sandwich.csv", sandwich_csv(r));
  }
}

}  // namespace imlab
