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

#include "imlab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imlab/errors.hpp"

namespace imlab {

char system_code(System s) {
  switch (s) {
    case System::kCaratheodory: return 'c';
    case System::kLempert: return 'l';
    case System::kKobayashi: return 'k';
    case System::kGreen: return 'g';
  }
  return '?';
}

System parse_system(std::string_view code) {
  if (code == "c") return System::kCaratheodory;
  if (code == "l") return System::kLempert;
  if (code == "k") return System::kKobayashi;
  if (code == "g") return System::kGreen;
  throw ConfigError("unknown system '" + std::string(code) + "' (expected c, l, k or g)");
}

MetricEstimate as_lower_bound_for(const MetricEstimate& e, System target) {
  if (e.system == target) return e;
  if (e.system != System::kCaratheodory || target == System::kGreen) {
    throw InconsistencyError(std::string("a lower bound for ") + system_code(e.system) +
                             " does not bound " + system_code(target) + " from below");
  }
  MetricEstimate out = e;
  out.system = target;
  out.upper = std::numeric_limits<double>::infinity();
  out.upper_provenance.clear();
  out.exact.reset();
  out.notes.push_back(std::string("lower bound inherited from c <= ") + system_code(target));
  return out;
}

MetricEstimate as_upper_bound_for(const MetricEstimate& e, System target) {
  if (e.system == target) return e;
  const bool ok = (e.system == System::kLempert && target != System::kGreen) ||
                  (e.system == System::kKobayashi && target == System::kCaratheodory);
  if (!ok) {
    throw InconsistencyError(std::string("an upper bound for ") + system_code(e.system) +
                             " does not bound " + system_code(target) + " from above");
  }
  MetricEstimate out = e;
  out.system = target;
  out.lower = 0.0;
  out.lower_provenance.clear();
  out.exact.reset();
  out.notes.push_back(std::string("upper bound inherited from ") + system_code(target) +
                      " <= " + system_code(e.system));
  return out;
}

MetricEstimate certify(const MetricEstimate& lower, const MetricEstimate& upper,
                       double tolerance) {
  if (lower.system != upper.system) {
    throw InconsistencyError("certify: estimates belong to different systems");
  }
  MetricEstimate out;
  out.system = lower.system;
  out.lower = lower.lower;
  out.lower_provenance = lower.lower_provenance;
  out.upper = upper.upper;
  out.upper_provenance = upper.upper_provenance;
  out.slack = lower.slack + upper.slack;
  out.tolerance = tolerance;
  out.exact = lower.exact ? lower.exact : upper.exact;
  out.notes = lower.notes;
  out.notes.insert(out.notes.end(), upper.notes.begin(), upper.notes.end());
  // Slack is already folded into each bound; a violation beyond it means a
  // solver produced a bound that is not a bound.
  const double allowance = 1e-12 * std::max(1.0, std::abs(out.lower));
  if (out.lower > out.upper + allowance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "inconsistent estimates for system " << system_code(out.system) << ": lower "
        << out.lower << " (" << out.lower_provenance << ") exceeds upper " << out.upper
        << " (" << out.upper_provenance << ")";
    throw InconsistencyError(msg.str());
  }
  out.certified = out.has_upper() && out.gap() < tolerance;
  return out;
}

MetricEstimate to_star_estimate(const MetricEstimate& e) {
  if (e.system == System::kGreen) return e;
  MetricEstimate out = e;
  out.system = System::kGreen;
  out.lower = std::tanh(e.lower);
  out.upper = e.has_upper() ? std::tanh(e.upper) : std::numeric_limits<double>::infinity();
  out.exact.reset();
  out.lower_provenance = e.lower_provenance.empty() ? "" : "tanh(" + e.lower_provenance + ")";
  out.upper_provenance = e.upper_provenance.empty() ? "" : "tanh(" + e.upper_provenance + ")";
  out.slack = e.slack;  // tanh is 1-Lipschitz
  out.certified = out.has_upper() && out.gap() < out.tolerance;
  return out;
}

}  // namespace imlab
