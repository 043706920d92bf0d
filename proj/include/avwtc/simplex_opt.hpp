// Copyright 2026 The avwtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Local maximization over the probability simplex: projected ascent with
// central-difference gradients, backtracking, and a pairwise-transfer polish,
// repeated from structured and random starting points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "avwtc/rng.hpp"

namespace avwtc {

struct OptimizerConfig {
  std::size_t restarts = 32;
  std::size_t max_iters = 500;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  /// Grid points per unit length for inner scans over state PMFs.
  std::size_t inner_grid_resolution = 200;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("OptimizerConfig: tolerance must be > 0");
    if (max_iters < 1) throw std::invalid_argument("OptimizerConfig: max_iters must be >= 1");
    if (inner_grid_resolution < 1) {
      throw std::invalid_argument("OptimizerConfig: inner_grid_resolution must be >= 1");
    }
  }
};

using SimplexObjective = std::function<double(std::span<const double>)>;

struct SimplexResult {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
};

/// Euclidean projection onto {x >= 0, sum x = 1}.
inline std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  std::vector<double> x(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[i] = std::max(0.0, v[i] - theta);
    total += x[i];
  }
  for (auto& xi : x) xi /= total;
  return x;
}

namespace detail {

inline constexpr double kGradientStep = 1e-5;
// Pairwise polish is quadratic in the dimension; skip it for large problems.
inline constexpr std::size_t kPolishMaxDim = 24;

inline std::vector<double> renormalized(std::vector<double> x) {
  double total = 0.0;
  for (double& v : x) {
    v = std::max(0.0, v);
    total += v;
  }
  for (double& v : x) v /= total;
  return x;
}

inline std::vector<double> numeric_gradient(const SimplexObjective& f,
                                            const std::vector<double>& x, double fx) {
  const double h = kGradientStep;
  std::vector<double> g(x.size());
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= h) {
      probe[i] = x[i] + h;
      const double up = f(renormalized(probe));
      probe[i] = x[i] - h;
      const double down = f(renormalized(probe));
      g[i] = (up - down) / (2.0 * h);
    } else {
      probe[i] = x[i] + h;
      g[i] = (f(renormalized(probe)) - fx) / h;
    }
    probe[i] = x[i];
  }
  return g;
}

inline SimplexResult ascend(const SimplexObjective& f, std::vector<double> x,
                            const OptimizerConfig& cfg) {
  x = renormalized(std::move(x));
  double fx = f(x);
  double step = 0.1;
  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    const auto g = numeric_gradient(f, x, fx);
    bool moved = false;
    double t = step;
    std::vector<double> trial(x.size());
    while (t > 1e-12) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + t * g[i];
      auto candidate = project_to_simplex(trial);
      const double fc = f(candidate);
      if (fc > fx) {
        const double gain = fc - fx;
        x = std::move(candidate);
        fx = fc;
        moved = gain > cfg.tolerance;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
    step = std::min(10.0, 2.0 * t);
  }

  if (x.size() <= kPolishMaxDim) {
    // Move mass between coordinate pairs with geometrically shrinking steps.
    for (double s = 0.05; s >= 1e-9; s *= 0.5) {
      bool improved = true;
      std::size_t sweeps = 0;
      while (improved && sweeps++ < 50) {
        improved = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
          for (std::size_t j = 0; j < x.size(); ++j) {
            if (i == j || x[j] <= 0.0) continue;
            const double amount = std::min(s, x[j]);
            auto candidate = x;
            candidate[i] += amount;
            candidate[j] -= amount;
            const double fc = f(candidate);
            if (fc > fx + cfg.tolerance * 1e-3) {
              x = std::move(candidate);
              fx = fc;
              improved = true;
            }
          }
        }
      }
    }
  }
  return {std::move(x), fx};
}

}  // namespace detail

/// Uniform random point on the simplex for restart `index`.
inline std::vector<double> random_simplex_point(std::size_t dim, std::uint64_t seed,
                                                std::uint64_t index) {
  Rng rng = make_rng(seed, index);
  std::vector<double> x(dim);
  double total = 0.0;
  for (auto& v : x) {
    v = sample_exponential(rng);
    total += v;
  }
  for (auto& v : x) v /= total;
  return x;
}

/// Best local maximum of f over the simplex of dimension `dim`.
///
/// Runs every structured start and then cfg.restarts random starts; restart r
/// draws its start from stream r of cfg.seed, so raising cfg.restarts never
/// lowers the result. Ties keep the earliest start.
inline SimplexResult maximize_on_simplex(const SimplexObjective& f, std::size_t dim,
                                         const OptimizerConfig& cfg,
                                         const std::vector<std::vector<double>>& starts = {}) {
  cfg.validate();
  if (dim == 0) throw std::invalid_argument("maximize_on_simplex: dimension must be >= 1");
  SimplexResult best;
  auto consider = [&](std::vector<double> x0) {
    if (x0.size() != dim) throw std::invalid_argument("maximize_on_simplex: start has wrong size");
    auto r = detail::ascend(f, std::move(x0), cfg);
    if (r.value > best.value || best.x.empty()) best = std::move(r);
  };
  for (const auto& s : starts) consider(s);
  for (std::size_t r = 0; r < cfg.restarts; ++r) consider(random_simplex_point(dim, cfg.seed, r));
  return best;
}

/// Golden-section search for the minimum of a unimodal f on [a, b].
inline std::pair<double, double> golden_section_min(const std::function<double(double)>& f,
                                                    double a, double b, double tol = 1e-10) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // Return the best point seen among the final bracket and its ends.
  std::pair<double, double> best{c, fc};
  if (fd < best.second) best = {d, fd};
  return best;
}

inline std::pair<double, double> golden_section_max(const std::function<double(double)>& f,
                                                    double a, double b, double tol = 1e-10) {
  auto r = golden_section_min([&](double t) { return -f(t); }, a, b, tol);
  return {r.first, -r.second};
}

}  // namespace avwtc
