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

// Convergence experiments: generators for non-monotone Hausdorff-convergent
// domain sequences, hypothesis gating, the per-(n, pair, system) sweep and
// deterministic report output.

#ifndef IMLAB_HARNESS_HPP
#define IMLAB_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imlab/estimate.hpp"
#include "imlab/extremal.hpp"
#include "imlab/geometry.hpp"
#include "imlab/sandwich.hpp"

namespace imlab {

// a(n) = scale / (n + shift)^power. With spike_scale > 0, indices n = 2^j
// (j >= 1) use scale * spike_scale / (n + shift)^(power / 2) instead, a
// sparse subsequence that still tends to 0.
struct AmplitudeLaw {
  double scale = 1.0;
  double shift = 2.0;
  double power = 1.0;
  double spike_scale = 0.0;

  double operator()(int n) const;
  bool is_spike(int n) const;
};

enum class WobbleMode {
  kRadial,       // (i) signed radial displacement a(n) sin(k theta + phase_n)
  kAlternating,  // (ii) envelope for even n, erosion for odd n
  kSpiky,        // (iii) mode (ii) with a spiking amplitude law
};

const char* wobble_mode_name(WobbleMode mode);
// Accepts "radial"/"i", "alternating"/"ii", "spiky"/"iii".
WobbleMode parse_wobble_mode(std::string_view text);

// Largest boundary distance over a grid of interior points.
double inradius_estimate(const PlanarDomain& d);

// Wobble sequence around `limit`. Radial mode displaces the densified
// boundary along rays from `star_center` (default: the point of largest
// boundary distance), with sign (-1)^n and a seeded phase per n. Throws
// GeneratorError when the amplitude law is not below half the inradius or a
// wobbled polygon is not simple.
DomainSequence gen_wobble_sequence(const PlanarDomain& limit, const AmplitudeLaw& amplitude,
                                   WobbleMode mode, std::uint64_t seed, int harmonic = 6,
                                   std::optional<Point> star_center = std::nullopt,
                                   int check_count = 64);

struct MonotoneSequences {
  DomainSequence interior;  // I_n = erode(D, 1 / (N0 + n))
  DomainSequence exterior;  // E_n = envelope(D, 1 / (N0 + n))
  int requested_n0 = 0;
  int n0 = 0;
  bool raised = false;
};

// Raises N0 until every erosion for n in [1, count] is connected and then
// validates both role invariants on [1, count]. Throws GeneratorError when
// no N0 up to 1000 works.
MonotoneSequences gen_monotone_sequences(const PlanarDomain& d, int n0, int count);

// Exterior sequence of the sublevel sets {rho < 1/k} for
// rho(z) = |z - c|^2 / R^2 - 1, i.e. discs of radius R sqrt(1 + 1/k), as
// polygons at `resolution`. The declared limit is the disc of radius R at
// `limit_resolution`.
DomainSequence gen_hyperconvex_exterior(Point center, double radius, double resolution,
                                        double limit_resolution);

// Role invariants on [1, count]; SequenceError becomes GeneratorError.
void validate_generated(const DomainSequence& s, int count);

struct MonotonicityWitness {
  int n = 0;
  // Point of D_n outside closure(D_{n+1}), and the reverse.
  std::optional<PointN> in_n_not_next;
  std::optional<PointN> in_next_not_n;
};

std::optional<Point> witness_outside(const PlanarDomain& a, const PlanarDomain& b);
std::vector<MonotonicityWitness> monotonicity_witnesses(const DomainSequence& s, int count);

// Smallest n0 in [1, count] with z and w inside D_n compactly for every n in
// [n0, count]; 0 when D_count itself fails.
int pair_entry_index(const DomainSequence& s, Point z, Point w, int count);

struct LimitSpec {
  std::string shape = "square";  // square, l_shape, disc, polygon, ball, polydisc
  double resolution = kDefaultResolution;
  double size = 1.0;  // half side (square), radius (disc, ball, polydisc)
  Point center = 0.0;
  std::vector<Point> vertices;  // polygon only
  int dim = 2;                  // ball and polydisc
  std::optional<Point> star_center;
};

struct SequenceSpec {
  std::string generator = "wobble";  // wobble, monotone, hyperconvex, affine_ball
  WobbleMode mode = WobbleMode::kAlternating;
  AmplitudeLaw amplitude;
  std::uint64_t seed = 1;
  int harmonic = 6;
  int n0 = 2;                      // monotone
  std::string side = "exterior";   // monotone: interior or exterior
  double resolution = 0.0;         // hyperconvex polygons (0: limit resolution)
};

struct SandwichSpec {
  bool enabled = false;
  int n0 = 3;
  int depth = 8;
  int search_cap = 60;
  System system = System::kKobayashi;
};

struct PointPair {
  PointN z;
  PointN w;
};

struct ExperimentConfig {
  int version = 1;
  std::string name;
  LimitSpec limit;
  SequenceSpec sequence;
  std::vector<PointPair> pairs;
  std::vector<System> systems;
  int depth = 30;
  // Rows n < evaluate_from carry geometry only.
  int evaluate_from = 1;
  // Inclusive window judged against the tolerance (default: final quartile).
  std::pair<int, int> final_window{0, 0};
  double tolerance = 1e-2;
  SolverConfig solver;
  SandwichSpec sandwich;
  std::string output_dir = "out";
};

// Strict parsing: unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

struct ConvergenceRow {
  int n = 0;
  std::size_t pair_id = 0;
  System system = System::kCaratheodory;
  MetricEstimate estimate;
  double limit_lower = 0.0;
  double limit_upper = 0.0;
  double hausdorff = 0.0;
  // |midpoint_n - midpoint_limit|, and the largest distance between any
  // points of the two certified intervals.
  double gap = 0.0;
  double certified_gap = 0.0;
  bool in_window = false;
  // In the window: gap below the tolerance. Elsewhere: consistency only.
  bool pass = true;
  std::string error;
};

struct ConvergenceSummary {
  std::size_t pair_id = 0;
  System system = System::kCaratheodory;
  double max_window_gap = 0.0;
  double max_window_certified_gap = 0.0;
  // Exploratory: max over evaluated n of gap(n) / hausdorff(n).
  double rate_constant = 0.0;
  bool pass = true;
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<double> hausdorff;   // index n - 1
  std::vector<double> amplitude;   // index n - 1 (0 when not applicable)
  std::vector<int> entry_index;    // per pair
  std::vector<MetricEstimate> limit_values;  // pair-major, then system
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceSummary> summary;
  std::vector<MonotonicityWitness> witnesses;
  int last_not_increasing = 0;  // largest n with D_n not inside D_{n+1}
  int last_not_decreasing = 0;  // largest n with D_{n+1} not inside D_n
  std::vector<std::string> notes;
  std::optional<SandwichCertificate> sandwich;
  std::optional<SandwichReport> sandwich_report;
  std::vector<std::string> sandwich_reverify_failures;
  std::string aborted;
  bool all_pass = false;
};

// Runs the sweep. Hypothesis violations throw HypothesisError and generator
// problems GeneratorError before any solver runs; per-cell solver errors
// are recorded in the rows and in `aborted`.
ConvergenceReport run_convergence_experiment(const ExperimentConfig& config);

// Sandwich-only run of a planar wobble config.
ConvergenceReport run_sandwich_experiment(const ExperimentConfig& config);

std::string report_csv(const ConvergenceReport& r);
std::string plot_csv(const ConvergenceReport& r);
nlohmann::json report_json(const ConvergenceReport& r);
std::string sandwich_csv(const ConvergenceReport& r);
// Writes report.csv, report.json, plot_data.csv (and sandwich.json /
// sandwich.csv when present) into `dir`.
void write_report(const ConvergenceReport& r, const std::string& dir);

// Polygon file format: {"vertices": [[re, im], ...], "resolution": r}; a bare
// vertex array uses the default resolution.
PlanarDomain polygon_from_json(const nlohmann::json& j);
nlohmann::json polygon_to_json(const PlanarDomain& d);
PlanarDomain load_polygon(const std::string& path);

// Fixed-format number rendering shared by every output file.
std::string format_number(double v);

}  // namespace imlab

#endif  // IMLAB_HARNESS_HPP
