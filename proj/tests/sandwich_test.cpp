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

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "imlab/errors.hpp"
#include "imlab/geometry.hpp"
#include "imlab/harness.hpp"
#include "imlab/sandwich.hpp"
#include "support.hpp"

namespace imlab {
namespace {

DomainSequence constant_sequence(const PlanarDomain& d) {
  return DomainSequence(SequenceRole::kWobble, "constant", [d](int) { return d; }, d);
}

// Smallest m with both containments for every m' in [m, cap], by direct scan.
int scan_first_index(const PlanarDomain& i, const PlanarDomain& e, const DomainSequence& s, int cap) {
  int first = cap + 1;
  for (int m = cap; m >= 1; --m) {
    const PlanarDomain& d = s.at(m);
    if (!compactly_contained(i, d).contained || !compactly_contained(d, e).contained) break;
    first = m;
  }
  return first;
}

TEST_SUITE("sandwich") {
  TEST_CASE("find_first_index against a direct scan") {
    const PlanarDomain disc = make_disc_polygon(0.0, 1.0, 1e-2);
    const PlanarDomain i1 = *erode(disc, 0.3).domain;
    const PlanarDomain e1 = envelope(disc, 0.3);
    const DomainSequence s = gen_wobble_sequence(disc, AmplitudeLaw{1.0, 2.0, 1.0, 0.0},
                                                 WobbleMode::kAlternating, 1);
    const int m = find_first_index(i1, e1, s, 30);
    CHECK(m == scan_first_index(i1, e1, s, 30));
    // Amplitude 1 / (m + 2) must drop below 0.3 minus the 2 * resolution margins.
    CHECK(1.0 / (m + 2) < 0.3);
    CHECK(1.0 / (m + 1) >= 0.3 - 4.0 * disc.resolution());
  }

  TEST_CASE("find_first_index on a constant sequence and a tight exterior") {
    const PlanarDomain disc = make_disc_polygon(0.0, 1.0, 1e-2);
    const PlanarDomain i1 = *erode(disc, 0.2).domain;
    const PlanarDomain e1 = envelope(disc, 0.2);
    CHECK(find_first_index(i1, e1, constant_sequence(disc), 10) == 1);
    const DomainSequence fat = constant_sequence(envelope(disc, 0.3));
    try {
      find_first_index(i1, e1, fat, 10);
      FAIL("expected a sequence error");
    } catch (const SequenceError& e) {
      CHECK(e.witness_index() == 10);
    }
  }

  TEST_CASE("constant sequence gives only Case 1 with L = I and U = E") {
    const PlanarDomain disc = make_disc_polygon(0.0, 1.0, 2e-3);
    const MonotoneSequences ie = gen_monotone_sequences(disc, 3, 6);
    const DomainSequence d = constant_sequence(disc);
    const SandwichCertificate cert = build_sandwich(ie.interior, ie.exterior, d, 5, 20);
    CHECK(cert.count_case2() == 0);
    for (int m : cert.m_indices) CHECK(m == 1);
    REQUIRE(cert.pairing.size() >= 5);
    for (std::size_t n = 0; n < 5; ++n) {
      CHECK(cert.pairing[n].l_label == "I_" + std::to_string(n + 1));
      CHECK(cert.pairing[n].u_label == "E_" + std::to_string(n + 1));
      CHECK(cert.lower[n].content_hash() == ie.interior.at(static_cast<int>(n) + 1).content_hash());
      CHECK(cert.upper[n].content_hash() == ie.exterior.at(static_cast<int>(n) + 1).content_hash());
    }
    CHECK(reverify_certificate(cert, d, 0.5 * disc.resolution()).empty());

    SolverConfig cfg;
    cfg.caratheodory.degree = 4;
    cfg.lempert.degree = 4;
    const SandwichReport rep =
        evaluate_sandwich(cert, d, {{0.0, 0.3}}, System::kLempert, cfg);
    CHECK(rep.failures == 0);
    CHECK_FALSE(rep.rows.empty());
    for (const SandwichRow& row : rep.rows) {
      CHECK(row.chain_holds);
      CHECK(row.upper_domain.lower <= row.sequence_domain.upper);
      CHECK(row.sequence_domain.lower <= row.lower_domain.upper);
    }
  }

  TEST_CASE("wobble with a slow amplitude law produces Case 2 and re-verifies") {
    const PlanarDomain disc = make_disc_polygon(0.0, 1.0, 2e-3);
    const MonotoneSequences ie = gen_monotone_sequences(disc, 3, 7);
    const DomainSequence d = gen_wobble_sequence(disc, AmplitudeLaw{1.5, 3.0, 1.0, 0.0},
                                                 WobbleMode::kAlternating, 1);
    const SandwichCertificate cert = build_sandwich(ie.interior, ie.exterior, d, 6, 60);
    CHECK(cert.count_case2() >= 1);
    bool has_s = false;
    for (const SandwichCase& c : cert.case_log) has_s = has_s || (c.kind == 2 && c.s >= 2);
    CHECK(has_s);
    for (std::size_t k = 1; k < cert.m_indices.size(); ++k) {
      CHECK(cert.m_indices[k] >= cert.m_indices[k - 1]);
    }
    CHECK(reverify_certificate(cert, d, 0.5 * disc.resolution()).empty());
    for (std::size_t n = 0; n < cert.pairing.size(); ++n) {
      CHECK(cert.pairing[n].d_index == cert.m_indices.front() + static_cast<int>(n));
      CHECK(cert.pairing[n].lower_margin > 0.0);
      CHECK(cert.pairing[n].upper_margin > 0.0);
      if (n > 0) CHECK(cert.pairing[n].nest_margin > 0.0);
    }
    const auto j = to_json(cert);
    CHECK(j.at("m_indices").size() == cert.m_indices.size());
  }

  TEST_CASE("spiky subsequence is skipped") {
    const PlanarDomain disc = make_disc_polygon(0.0, 1.0, 2e-3);
    const MonotoneSequences ie = gen_monotone_sequences(disc, 3, 5);
    const AmplitudeLaw law{1.0, 2.0, 2.0, 1.5};
    const DomainSequence d = gen_wobble_sequence(disc, law, WobbleMode::kSpiky, 1);
    const SandwichCertificate cert = build_sandwich(ie.interior, ie.exterior, d, 4, 40);
    CHECK(reverify_certificate(cert, d, 0.5 * disc.resolution()).empty());
    const double widest = 1.0 / (ie.n0 + 1);
    for (int s = 2; s <= 40; s *= 2) {
      if (law(s) >= widest) CHECK(s < cert.m_indices.front());
    }
    for (const SandwichPairing& p : cert.pairing) {
      CHECK(law(p.d_index) < widest);
    }
  }
}

}  // namespace
}  // namespace imlab
