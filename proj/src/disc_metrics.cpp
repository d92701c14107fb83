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

#include "imlab/disc_metrics.hpp"

#include <cmath>

#include "imlab/errors.hpp"

namespace imlab {
namespace {

void require_in_disc(Point z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("point is not in the open unit disc");
}

}  // namespace

HyperbolicValue HyperbolicValue::from_value(double v) {
  if (!(v >= 0.0)) throw DomainError("hyperbolic value must be nonnegative");
  if (std::isinf(v)) return infinite();
  return {v, std::tanh(v)};
}

double mobius_distance(Point a, Point b) {
  require_in_disc(a);
  require_in_disc(b);
  return std::abs((a - b) / (1.0 - std::conj(a) * b));
}

HyperbolicValue hyperbolic_distance(Point a, Point b) {
  const double m = mobius_distance(a, b);
  return {std::atanh(m), m};
}

double to_star(const HyperbolicValue& d) { return d.star_value; }

double to_star(double d) {
  if (!(d >= 0.0)) throw DomainError("hyperbolic value must be nonnegative");
  return std::tanh(d);
}

HyperbolicValue from_star(double s) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("star value must lie in [0, 1)");
  return {std::atanh(s), s};
}

DiscAutomorphism::DiscAutomorphism(Point a, double angle)
    : a_(a), rotation_(std::polar(1.0, angle)) {
  require_in_disc(a);
}

Point DiscAutomorphism::operator()(Point z) const {
  return rotation_ * (z - a_) / (1.0 - std::conj(a_) * z);
}

DiscAutomorphism DiscAutomorphism::inverse() const {
  // z = conj(R) (w + R a) / (1 + conj(R a) w).
  const Point b = -rotation_ * a_;
  return DiscAutomorphism(b, -std::arg(rotation_));
}

}  // namespace imlab
