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

#include "imlab/sandwich.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "imlab/errors.hpp"

namespace imlab {

const char* role_name(SequenceRole role) {
  switch (role) {
    case SequenceRole::kInterior:
      return "interior";
    case SequenceRole::kExterior:
      return "exterior";
    case SequenceRole::kWobble:
      return "wobble";
  }
  return "?";
}

DomainSequence::DomainSequence(SequenceRole role, std::string name, Generator generator,
                               PlanarDomain limit)
    : role_(role),
      name_(std::move(name)),
      generator_(std::move(generator)),
      limit_(std::move(limit)),
      cache_(std::make_shared<Cache>()) {}

const PlanarDomain& DomainSequence::at(int n) const {
  if (n < 1) throw SequenceError("sequence indices start at 1", n);
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->domains.find(n);
    if (it != cache_->domains.end()) return *it->second;
  }
  auto made = std::make_unique<PlanarDomain>(generator_(n));
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto [it, inserted] = cache_->domains.emplace(n, std::move(made));
  return *it->second;
}

double DomainSequence::hausdorff_to_limit(int n) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->hausdorff.find(n);
    if (it != cache_->hausdorff.end()) return it->second;
  }
  const double h = hausdorff(at(n), limit_).distance;
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->hausdorff.emplace(n, h);
  return h;
}

void DomainSequence::validate(int count) const {
  auto fail = [&](const std::string& what, int index) {
    throw SequenceError(name_ + " (" + role_name(role_) + "): " + what + " at index " +
                            std::to_string(index),
                        index);
  };
  switch (role_) {
    case SequenceRole::kInterior:
      for (int n = 1; n < count; ++n) {
        if (!compactly_contained(at(n), at(n + 1)).contained) fail("I_n not inside I_{n+1}", n);
      }
      for (int n = 1; n <= count; ++n) {
        if (!compactly_contained(at(n), limit_).contained) fail("I_n not inside the limit", n);
      }
      break;
    case SequenceRole::kExterior:
      for (int n = 1; n < count; ++n) {
        if (!compactly_contained(at(n + 1), at(n)).contained) fail("E_{n+1} not inside E_n", n);
      }
      for (int n = 1; n <= count; ++n) {
        if (!compactly_contained(limit_, at(n)).contained) fail("limit not inside E_n", n);
      }
      break;
    case SequenceRole::kWobble: {
      // Trend check: the tail of the range stays below the head.
      if (count < 3) break;
      const int third = std::max(1, count / 3);
      double head = 0.0, tail = 0.0;
      int tail_arg = count;
      for (int n = 1; n <= third; ++n) head = std::max(head, hausdorff_to_limit(n));
      for (int n = count - third + 1; n <= count; ++n) {
        const double h = hausdorff_to_limit(n);
        if (h > tail) {
          tail = h;
          tail_arg = n;
        }
      }
      if (!(tail < head)) fail("Hausdorff distance to the limit does not decrease", tail_arg);
      break;
    }
  }
}

int find_first_index(const PlanarDomain& interior, const PlanarDomain& exterior,
                     const DomainSequence& sequence, int search_cap) {
  if (search_cap < 1) throw ConfigError("search cap must be positive");
  for (int m = search_cap; m >= 1; --m) {
    const PlanarDomain& d = sequence.at(m);
    const bool ok = compactly_contained(interior, d).contained &&
                    compactly_contained(d, exterior).contained;
    if (!ok) {
      if (m == search_cap) {
        throw SequenceError("sequence " + sequence.name() +
                                " not between the interior and exterior domains up to the cap; "
                                "first violating index " +
                                std::to_string(m),
                            m);
      }
      return m + 1;
    }
  }
  return 1;
}

int SandwichCertificate::count_case2() const {
  return static_cast<int>(std::count_if(case_log.begin(), case_log.end(),
                                        [](const SandwichCase& c) { return c.kind == 2; }));
}

namespace {

// A domain compactly inside `outer` containing closure(union of parts).
PlanarDomain construct_upper(const std::vector<PlanarDomain>& parts, const PlanarDomain& outer,
                             double resolution, double* delta_out) {
  const PlanarDomain hull = polygon_union(parts);
  const ContainmentResult room = compactly_contained(hull, outer, resolution);
  double delta = 0.5 * room.margin;
  const double floor = 2.5 * resolution;
  while (delta > floor) {
    try {
      PlanarDomain cand = envelope(hull, delta).with_resolution(resolution);
      bool ok = compactly_contained(cand, outer, resolution).contained;
      for (const PlanarDomain& p : parts) {
        ok = ok && compactly_contained(p, cand, resolution).contained;
      }
      if (ok) {
        *delta_out = delta;
        return cand;
      }
    } catch (const GeometryError&) {
      // A degenerate offset counts as a failed radius.
    }
    delta *= 0.5;
  }
  throw ConstructionError("no envelope radius above the resolution fits between the union and "
                          "the previous upper domain");
}

}  // namespace

SandwichCertificate build_sandwich(const DomainSequence& interior, const DomainSequence& exterior,
                                   const DomainSequence& sequence, int depth, int search_cap) {
  if (depth < 1) throw ConfigError("sandwich depth must be positive");
  SandwichCertificate cert;
  cert.search_cap = search_cap;
  cert.resolution = sequence.limit().resolution();
  const double res = cert.resolution;

  std::vector<std::string> l_labels, u_labels;
  std::vector<int> d_of;
  auto append = [&](const PlanarDomain& l, std::string ll, PlanarDomain u, std::string ul, int d) {
    cert.lower.push_back(l);
    cert.upper.push_back(std::move(u));
    l_labels.push_back(std::move(ll));
    u_labels.push_back(std::move(ul));
    d_of.push_back(d);
  };
  auto label = [](const char* p, int k) { return std::string(p) + "_" + std::to_string(k); };

  const int m1 = find_first_index(interior.at(1), exterior.at(1), sequence, search_cap);
  cert.m_indices.push_back(m1);
  append(interior.at(1), label("I", 1), exterior.at(1), label("E", 1), m1);
  int paired = m1;
  for (int stage = 1; stage < depth; ++stage) {
    const int m_next =
        find_first_index(interior.at(stage + 1), exterior.at(stage + 1), sequence, search_cap);
    if (m_next < cert.m_indices.back()) {
      throw InconsistencyError("first indices must be nondecreasing");
    }
    SandwichCase rec;
    rec.stage = stage;
    rec.m_next = m_next;
    rec.paired = paired;
    if (m_next <= paired + 1) {
      if (paired + 1 > search_cap) {
        cert.notes.push_back("stopped at stage " + std::to_string(stage) +
                             ": next pairing index passes the search cap");
        break;
      }
      rec.kind = 1;
      append(interior.at(stage + 1), label("I", stage + 1), exterior.at(stage + 1),
             label("E", stage + 1), paired + 1);
      paired += 1;
    } else {
      const int s = m_next - paired;
      rec.kind = 2;
      rec.s = s;
      for (int k = 2; k <= s; ++k) {
        std::vector<PlanarDomain> parts{exterior.at(stage + 1)};
        for (int l = paired + k - 1; l <= paired + s - 1; ++l) parts.push_back(sequence.at(l));
        double delta = 0.0;
        PlanarDomain u = construct_upper(parts, cert.upper.back(), res, &delta);
        rec.deltas.push_back(delta);
        append(interior.at(stage), label("I", stage), std::move(u), label("U*", cert.upper.size() + 1),
               paired + k - 1);
      }
      append(interior.at(stage + 1), label("I", stage + 1), exterior.at(stage + 1),
             label("E", stage + 1), paired + s);
      paired += s;
    }
    cert.m_indices.push_back(m_next);
    cert.case_log.push_back(std::move(rec));
  }

  for (std::size_t i = 0; i < cert.lower.size(); ++i) {
    SandwichPairing p;
    p.n = static_cast<int>(i) + 1;
    p.d_index = d_of[i];
    p.l_label = l_labels[i];
    p.u_label = u_labels[i];
    const PlanarDomain& d = sequence.at(p.d_index);
    const ContainmentResult lo = compactly_contained(cert.lower[i], d, res);
    const ContainmentResult up = compactly_contained(d, cert.upper[i], res);
    p.lower_margin = lo.margin;
    p.upper_margin = up.margin;
    if (!lo.contained || !up.contained) {
      throw ConstructionError("pairing " + std::to_string(p.n) + " (D_" +
                              std::to_string(p.d_index) + ") fails to verify");
    }
    if (i > 0) {
      const ContainmentResult nest = compactly_contained(cert.upper[i], cert.upper[i - 1], res);
      p.nest_margin = nest.margin;
      if (!nest.contained) {
        throw ConstructionError("U_" + std::to_string(p.n) + " is not compactly inside U_" +
                                std::to_string(p.n - 1));
      }
    }
    cert.pairing.push_back(std::move(p));
  }
  return cert;
}

std::vector<std::string> reverify_certificate(const SandwichCertificate& cert,
                                              const DomainSequence& sequence, double resolution) {
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < cert.pairing.size(); ++i) {
    const SandwichPairing& p = cert.pairing[i];
    const std::string at = "n=" + std::to_string(p.n);
    const PlanarDomain& d = sequence.at(p.d_index);
    if (!compactly_contained(cert.lower[i], d, resolution).contained) {
      failures.push_back(at + ": L_n not compactly inside D");
    }
    if (!compactly_contained(d, cert.upper[i], resolution).contained) {
      failures.push_back(at + ": D not compactly inside U_n");
    }
    if (i > 0) {
      if (!compactly_contained(cert.upper[i], cert.upper[i - 1], resolution).contained) {
        failures.push_back(at + ": U_n not compactly inside U_{n-1}");
      }
      // L_{n-1} inside L_n: identical entries or strictly nested ones.
      if (cert.lower[i - 1].content_hash() != cert.lower[i].content_hash() &&
          !compactly_contained(cert.lower[i - 1], cert.lower[i], resolution).contained) {
        failures.push_back(at + ": L_{n-1} not inside L_n");
      }
    }
  }
  return failures;
}

namespace {

nlohmann::json polygon_json(const PlanarDomain& d) {
  nlohmann::json v = nlohmann::json::array();
  for (const Point& p : d.vertices()) v.push_back({p.real(), p.imag()});
  return {{"vertices", v}, {"resolution", d.resolution()}};
}

}  // namespace

nlohmann::json to_json(const SandwichCertificate& cert) {
  nlohmann::json j;
  j["format"] = "imlab.sandwich_certificate";
  j["version"] = 1;
  j["search_cap"] = cert.search_cap;
  j["resolution"] = cert.resolution;
  j["m_indices"] = cert.m_indices;
  auto& pairs = j["pairing"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cert.pairing.size(); ++i) {
    const SandwichPairing& p = cert.pairing[i];
    pairs.push_back({{"n", p.n},
                     {"d_index", p.d_index},
                     {"L", p.l_label},
                     {"U", p.u_label},
                     {"lower_margin", p.lower_margin},
                     {"upper_margin", p.upper_margin},
                     {"nest_margin", p.nest_margin},
                     {"L_polygon", polygon_json(cert.lower[i])},
                     {"U_polygon", polygon_json(cert.upper[i])}});
  }
  auto& cases = j["case_log"] = nlohmann::json::array();
  for (const SandwichCase& c : cert.case_log) {
    cases.push_back({{"stage", c.stage},
                     {"m_next", c.m_next},
                     {"paired", c.paired},
                     {"case", c.kind},
                     {"s", c.s},
                     {"deltas", c.deltas}});
  }
  j["notes"] = cert.notes;
  return j;
}

SandwichReport evaluate_sandwich(const SandwichCertificate& cert, const DomainSequence& sequence,
                                 const std::vector<std::pair<Point, Point>>& pairs, System system,
                                 const SolverConfig& config) {
  SandwichReport report;
  report.entry_index.assign(pairs.size(), 0);
  // Repeated L entries and shared domains are estimated once.
  std::map<std::tuple<std::uint64_t, std::size_t>, MetricEstimate> memo;
  auto estimate = [&](const PlanarDomain& d, std::size_t pid) {
    const auto key = std::make_tuple(d.content_hash(), pid);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const Domain dom = d;
    MetricEstimate e = estimate_system(dom, {pairs[pid].first}, {pairs[pid].second}, system, config);
    memo.emplace(key, e);
    return e;
  };
  for (std::size_t pid = 0; pid < pairs.size(); ++pid) {
    const Point pts[2] = {pairs[pid].first, pairs[pid].second};
    for (std::size_t i = 0; i < cert.pairing.size(); ++i) {
      if (!contains_compact(cert.lower[i], pts)) continue;
      if (report.entry_index[pid] == 0) report.entry_index[pid] = cert.pairing[i].n;
      SandwichRow row;
      row.n = cert.pairing[i].n;
      row.d_index = cert.pairing[i].d_index;
      row.pair_id = pid;
      try {
        row.upper_domain = estimate(cert.upper[i], pid);
        row.sequence_domain = estimate(sequence.at(row.d_index), pid);
        row.lower_domain = estimate(cert.lower[i], pid);
      } catch (const InconsistencyError& e) {
        row.chain_holds = false;
        row.failure = e.what();
      }
      if (row.chain_holds) {
        // The chain fails only if a certified lower bound of a smaller value
        // exceeds a certified upper bound of a larger one.
        const double tol = 1e-12;
        std::ostringstream why;
        if (row.upper_domain.lower > row.sequence_domain.upper + tol) {
          why << "d_U lower " << row.upper_domain.lower << " > d_D upper "
              << row.sequence_domain.upper << "; ";
        }
        if (row.sequence_domain.lower > row.lower_domain.upper + tol) {
          why << "d_D lower " << row.sequence_domain.lower << " > d_L upper "
              << row.lower_domain.upper << "; ";
        }
        if (row.upper_domain.lower > row.lower_domain.upper + tol) {
          why << "d_U lower exceeds d_L upper; ";
        }
        row.failure = why.str();
        row.chain_holds = row.failure.empty();
      }
      if (!row.chain_holds) ++report.failures;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace imlab
