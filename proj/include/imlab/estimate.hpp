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

#ifndef IMLAB_ESTIMATE_HPP
#define IMLAB_ESTIMATE_HPP

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imlab {

// The four classical systems. Values of kGreen live in [0, 1) (the
// m-contractible scale); the others in hyperbolic units.
enum class System { kCaratheodory, kLempert, kKobayashi, kGreen };

char system_code(System s);
System parse_system(std::string_view code);

// Certified interval [lower, upper] for d_D(z, w).
struct MetricEstimate {
  System system = System::kCaratheodory;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::string lower_provenance;
  std::string upper_provenance;
  // Absolute slack already folded into the bounds by the producing solver.
  double slack = 0.0;
  double tolerance = 0.0;
  bool certified = false;
  // Exact value where an independent closed form or conformal map exists.
  std::optional<double> exact;
  std::vector<std::string> notes;

  double gap() const { return upper - lower; }
  bool has_upper() const { return upper < std::numeric_limits<double>::infinity(); }
  // Interval midpoint; equals `lower` when no finite upper bound exists.
  double midpoint() const { return has_upper() ? 0.5 * (lower + upper) : lower; }
  bool is_star() const { return system == System::kGreen; }
};

// Reinterprets a bound for another system using c <= k <= l and c <= d <= l.
// A lower bound from c is valid for every system; an upper bound from l is
// valid for c, k and l; an upper bound from k is valid for c and k. Throws
// InconsistencyError for any other request.
MetricEstimate as_lower_bound_for(const MetricEstimate& e, System target);
MetricEstimate as_upper_bound_for(const MetricEstimate& e, System target);

// Merges a lower-side and an upper-side estimate of the same system. Throws
// InconsistencyError when lower > upper + combined slack; flags `certified`
// when the resulting gap is below `tolerance`.
MetricEstimate certify(const MetricEstimate& lower, const MetricEstimate& upper,
                       double tolerance);

// tanh image of a c/l/k interval as a g interval (c* <= g <= l*).
MetricEstimate to_star_estimate(const MetricEstimate& e);

}  // namespace imlab

#endif  // IMLAB_ESTIMATE_HPP
