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

#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imlab::detail {

OptimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x0, double step, int max_evaluations,
                           double tolerance) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = f(simplex[i]);
    ++evals;
  }
  std::vector<std::size_t> order(n + 1);
  // Dimension-adaptive coefficients (Gao and Han).
  const double dn = static_cast<double>(std::max<std::size_t>(n, 2));
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;
  while (evals < max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b] || (values[a] == values[b] && a < b);
    });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (std::abs(values[worst] - values[best]) <= tolerance * (std::abs(values[best]) + 1e-30)) {
      double spread = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
        }
      }
      if (spread < 1e-12) break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      return p;
    };
    std::vector<double> xr = along(-alpha);
    const double fr = f(xr);
    ++evals;
    if (fr < values[best]) {
      std::vector<double> xe = along(-alpha * beta);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        simplex[worst] = std::move(xe);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(xr);
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = std::move(xr);
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    std::vector<double> xc = along(outside ? -alpha * gamma : gamma);
    const double fc = f(xc);
    ++evals;
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = std::move(xc);
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) {
        simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
      }
      values[i] = f(simplex[i]);
      ++evals;
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {simplex[idx], values[idx], evals};
}

OptimizeResult bfgs(
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& fg,
    std::vector<double> x, int max_iterations, double gradient_tolerance,
    const std::function<bool(const std::vector<double>&, double)>& stop) {
  const std::size_t n = x.size();
  std::vector<double> g(n), g_new(n), x_new(n), dir(n), s(n), y(n);
  double fx = fg(x, g);
  int evals = 1;
  if (n == 0 || (stop && stop(x, fx))) return {x, fx, evals};
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  bool scaled = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm < gradient_tolerance) break;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc -= h[i * n + j] * g[j];
      dir[i] = acc;
    }
    double slope = std::inner_product(dir.begin(), dir.end(), g.begin(), 0.0);
    if (!(slope < 0.0)) {
      // Lost descent: restart from steepest descent.
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        h[i * n + i] = 1.0;
        dir[i] = -g[i];
      }
      slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
    }
    double t = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * dir[i];
      f_new = fg(x_new, g_new);
      ++evals;
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
    if (sy > 1e-300) {
      if (!scaled) {
        const double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
        const double scale = sy / yy;
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
        scaled = true;
      }
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      std::vector<double> hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += h[i * n + j] * y[j];
      }
      const double yhy = std::inner_product(y.begin(), y.end(), hy.begin(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
      }
    }
    x.swap(x_new);
    g.swap(g_new);
    const double improvement = fx - f_new;
    fx = f_new;
    if (stop && stop(x, fx)) break;
    if (improvement <= 1e-15 * (std::abs(fx) + 1e-30)) break;
  }
  return {x, fx, evals};
}

}  // namespace imlab::detail
