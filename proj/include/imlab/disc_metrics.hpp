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

#ifndef IMLAB_DISC_METRICS_HPP
#define IMLAB_DISC_METRICS_HPP

#include <complex>
#include <limits>

#include "imlab/geometry.hpp"

namespace imlab {

// A value of a contractible system together with its tanh image. `value`
// may be +infinity only as a solver-side "no candidate" marker.
struct HyperbolicValue {
  double value = 0.0;
  double star_value = 0.0;

  static HyperbolicValue from_value(double v);
  static HyperbolicValue infinite() {
    return {std::numeric_limits<double>::infinity(), 1.0};
  }
  bool is_finite() const { return value < std::numeric_limits<double>::infinity(); }
};

// |(a - b) / (1 - conj(a) b)|. Throws DomainError outside the open unit disc.
double mobius_distance(Point a, Point b);

// artanh of the Mobius distance.
HyperbolicValue hyperbolic_distance(Point a, Point b);

double to_star(const HyperbolicValue& d);
double to_star(double d);
// Inverse of to_star; throws DomainError unless s in [0, 1).
HyperbolicValue from_star(double s);

// Disc automorphism z -> rotation * (z - a) / (1 - conj(a) z), |a| < 1.
class DiscAutomorphism {
 public:
  DiscAutomorphism(Point a, double angle);
  Point operator()(Point z) const;
  DiscAutomorphism inverse() const;
  Point center() const { return a_; }

 private:
  Point a_;
  Point rotation_;
};

}  // namespace imlab

#endif  // IMLAB_DISC_METRICS_HPP
