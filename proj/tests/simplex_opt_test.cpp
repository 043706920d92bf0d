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


#include "avwtc/simplex_opt.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace avwtc {
namespace {

TEST(ProjectToSimplex, FixesPointsAlreadyOnSimplex) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const auto q = project_to_simplex(p);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q[i], p[i], 1e-15);
}

TEST(ProjectToSimplex, MatchesHandComputedProjection) {
  // (1, 1, -1) projects to (0.5, 0.5, 0).
  const auto q = project_to_simplex(std::vector<double>{1.0, 1.0, -1.0});
  EXPECT_NEAR(q[0], 0.5, 1e-15);
  EXPECT_NEAR(q[1], 0.5, 1e-15);
  EXPECT_EQ(q[2], 0.0);
}

TEST(ProjectToSimplex, ResultIsFeasible) {
  Rng rng = make_rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(5);
    for (auto& x : v) x = 4.0 * uniform01(rng) - 2.0;
    const auto q = project_to_simplex(v);
    double sum = 0.0;
    for (double x : q) {
      EXPECT_GE(x, 0.0);
      sum += x;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(MaximizeOnSimplex, FindsEntropyMaximum) {
  auto f = [](std::span<const double> x) {
    double h = 0.0;
    for (double v : x) {
      if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
  };
  OptimizerConfig cfg;
  cfg.restarts = 4;
  const auto r = maximize_on_simplex(f, 4, cfg);
  EXPECT_NEAR(r.value, 2.0, 1e-8);
  for (double v : r.x) EXPECT_NEAR(v, 0.25, 1e-3);
}

TEST(MaximizeOnSimplex, FindsLinearVertex) {
  const std::vector<double> c{0.1, 0.7, 0.3};
  auto f = [&](std::span<const double> x) {
    return std::inner_product(c.begin(), c.end(), x.begin(), 0.0);
  };
  OptimizerConfig cfg;
  cfg.restarts = 3;
  const auto r = maximize_on_simplex(f, 3, cfg);
  EXPECT_NEAR(r.value, 0.7, 1e-9);
  EXPECT_NEAR(r.x[1], 1.0, 1e-9);
}

TEST(MaximizeOnSimplex, MoreRestartsNeverHurt) {
  // Two separated bumps; the taller one is narrow.
  auto f = [](std::span<const double> x) {
    const double a = x[0] - 0.9;
    const double b = x[0] - 0.1;
    return std::exp(-a * a / 0.0005) * 2.0 + std::exp(-b * b / 0.05);
  };
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t r : {1u, 2u, 4u, 8u, 16u}) {
    OptimizerConfig cfg;
    cfg.restarts = r;
    const double v = maximize_on_simplex(f, 2, cfg).value;
    EXPECT_GE(v, previous);
    previous = v;
  }
}

TEST(MaximizeOnSimplex, DeterministicForSeed) {
  auto f = [](std::span<const double> x) { return std::sin(7.0 * x[0]) + x[1] * x[2]; };
  OptimizerConfig cfg;
  cfg.restarts = 5;
  cfg.seed = 11;
  const auto a = maximize_on_simplex(f, 3, cfg);
  const auto b = maximize_on_simplex(f, 3, cfg);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.x, b.x);
}

TEST(OptimizerConfig, RejectsInvalidSettings) {
  OptimizerConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.restarts = 1;
  cfg.tolerance = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(GoldenSection, FindsParabolaMinimum) {
  const auto [x, v] = golden_section_min([](double t) { return (t - 0.3) * (t - 0.3) + 1.0; },
                                         0.0, 1.0, 1e-12);
  EXPECT_NEAR(x, 0.3, 1e-6);
  EXPECT_NEAR(v, 1.0, 1e-12);
  const auto [y, w] = golden_section_max([](double t) { return -std::abs(t - 0.8); }, 0.0, 1.0);
  EXPECT_NEAR(y, 0.8, 1e-8);
  EXPECT_NEAR(w, 0.0, 1e-8);
}

}  // namespace
}  // namespace avwtc
