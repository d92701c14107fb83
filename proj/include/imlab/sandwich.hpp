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

// Interleaving construction for Hausdorff-convergent domain sequences.
//
// Given an exhausting interior sequence I_n, a shrinking exterior sequence
// E_n and a sequence D_m converging to the same limit, build_sandwich picks
// indices m_k and sequences L_n, U_n with
//
//   L_n  inside  D_{m_1 + n - 1}  compactly inside  U_n,
//
// every containment verified geometrically and recorded with its margin.

#ifndef IMLAB_SANDWICH_HPP
#define IMLAB_SANDWICH_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imlab/estimate.hpp"
#include "imlab/extremal.hpp"
#include "imlab/geometry.hpp"

namespace imlab {

enum class SequenceRole { kInterior, kExterior, kWobble };

const char* role_name(SequenceRole role);

// Lazily generated, memoized sequence of polygons indexed from 1.
class DomainSequence {
 public:
  using Generator = std::function<PlanarDomain(int)>;

  DomainSequence(SequenceRole role, std::string name, Generator generator, PlanarDomain limit);

  SequenceRole role() const { return role_; }
  const std::string& name() const { return name_; }
  const PlanarDomain& limit() const { return limit_; }

  // The n-th domain (n >= 1). Safe to call concurrently.
  const PlanarDomain& at(int n) const;
  // Hausdorff distance of the closures of D_n and the limit.
  double hausdorff_to_limit(int n) const;

  // Checks the role invariants on indices [1, count] (interior: I_n inside
  // I_{n+1} compactly; exterior: E_{n+1} inside E_n compactly and the limit
  // inside every E_n compactly; wobble: Hausdorff distance to the limit
  // decreasing along the range). Throws SequenceError with the witness index.
  void validate(int count) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::map<int, std::unique_ptr<PlanarDomain>> domains;
    std::map<int, double> hausdorff;
  };

  SequenceRole role_;
  std::string name_;
  Generator generator_;
  PlanarDomain limit_;
  std::shared_ptr<Cache> cache_;
};

// Smallest m <= search_cap with I inside D_m' compactly and D_m' inside E
// compactly for every m' in [m, search_cap]. Throws SequenceError (witness:
// the violating index) when D_{search_cap} already fails.
int find_first_index(const PlanarDomain& interior, const PlanarDomain& exterior,
                     const DomainSequence& sequence, int search_cap);

struct SandwichPairing {
  int n = 0;              // position in L/U (1-based)
  int d_index = 0;        // paired D index m_1 + n - 1
  std::string l_label;    // "I_k"
  std::string u_label;    // "E_k" or "U*_k" for constructed entries
  double lower_margin = 0.0;  // L_n inside D compactly
  double upper_margin = 0.0;  // D inside U_n compactly
  double nest_margin = 0.0;   // U_n inside U_{n-1} compactly (n >= 2)
};

struct SandwichCase {
  int stage = 0;       // M: stage that produced m_{M+1}
  int m_next = 0;      // m_{M+1}
  int paired = 0;      // D index paired with the last entry before the stage
  int kind = 1;        // 1 or 2
  int s = 0;           // Case 2 offset m_{M+1} - paired
  std::vector<double> deltas;  // envelope radii of constructed U entries
};

struct SandwichCertificate {
  int search_cap = 0;
  double resolution = 0.0;
  std::vector<int> m_indices;
  std::vector<PlanarDomain> lower;  // L_n
  std::vector<PlanarDomain> upper;  // U_n
  std::vector<SandwichPairing> pairing;
  std::vector<SandwichCase> case_log;
  std::vector<std::string> notes;

  int count_case2() const;
};

nlohmann::json to_json(const SandwichCertificate& cert);

// Reproduces the inductive construction for stages 1..depth. Stops early,
// with a note, once the next pairing would pass the search horizon.
SandwichCertificate build_sandwich(const DomainSequence& interior,
                                   const DomainSequence& exterior,
                                   const DomainSequence& sequence, int depth, int search_cap);

// Re-checks every recorded containment at the given resolution; returns one
// message per failure (empty when the certificate holds).
std::vector<std::string> reverify_certificate(const SandwichCertificate& cert,
                                              const DomainSequence& sequence,
                                              double resolution);

struct SandwichRow {
  int n = 0;
  int d_index = 0;
  std::size_t pair_id = 0;
  MetricEstimate upper_domain;  // estimate on U_n
  MetricEstimate sequence_domain;  // estimate on D_{m_1 + n - 1}
  MetricEstimate lower_domain;  // estimate on L_n
  bool chain_holds = true;
  std::string failure;
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  // First n with both points of the pair in L_n with margin (0: never).
  std::vector<int> entry_index;
  int failures = 0;
};

// Estimates d_{U_n} <= d_{D_{m_1+n-1}} <= d_{L_n} for every n where the pair
// sits inside L_n with margin, and flags any chain violated beyond the
// certified intervals.
SandwichReport evaluate_sandwich(const SandwichCertificate& cert,
                                 const DomainSequence& sequence,
                                 const std::vector<std::pair<Point, Point>>& pairs, System system,
                                 const SolverConfig& config);

}  // namespace imlab

#endif  // IMLAB_SANDWICH_HPP
