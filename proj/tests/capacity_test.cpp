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


#include "avwtc/capacity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace avwtc {
namespace {

OptimizerConfig quick_config(std::uint64_t seed = 0) {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  cfg.inner_grid_resolution = 50;
  cfg.seed = seed;
  return cfg;
}

Avwtc random_instance(std::uint64_t seed, std::size_t states = 2) {
  Rng rng = make_rng(seed);
  std::vector<Dmc> main, eaves;
  for (std::size_t s = 0; s < states; ++s) {
    main.push_back(random_dmc(2, 2, rng));
    eaves.push_back(random_dmc(2, 2, rng));
  }
  return Avwtc(std::move(main), std::move(eaves));
}

// Oracle: build the full joint over (U, X, S, Y, Z) and read off
// I(U;Y) - I(U;Z|S) with the generic information routines.
double full_joint_objective(const JointInput& q, const Pmf& q_s, const Avwtc& ch) {
  const std::size_t nu = q.u_size(), nx = q.x_size(), k = ch.state_count();
  const std::size_t ny = ch.main_output_size(), nz = ch.eaves_output_size();
  std::vector<double> t(nu * nx * k * ny * nz, 0.0);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t s = 0; s < k; ++s)
        for (std::size_t y = 0; y < ny; ++y)
          for (std::size_t z = 0; z < nz; ++z)
            t[(((u * nx + x) * k + s) * ny + y) * nz + z] =
                q(u, x) * q_s[s] * ch.main()[s](x, y) * ch.eaves()[s](x, z);
  const JointPmf j({nu, nx, k, ny, nz}, Pmf::normalized(t).vec());
  return mutual_info(j, {0}, {3}) - cond_mutual_info(j, {0}, {4}, {2});
}

JointInput random_joint_input(Rng& rng, std::size_t nx) {
  return JointInput(nx, nx, random_pmf(nx * nx, rng).vec());
}

TEST(ObjectiveThm1, IdenticalChannelsGiveZero) {
  Rng rng = make_rng(1);
  const Dmc w = random_dmc(3, 3, rng);
  const Avwtc ch({w}, {w});
  for (int t = 0; t < 10; ++t) {
    EXPECT_NEAR(objective_thm1(JointInput::identity(3), Pmf::point_mass(1, 0), ch), 0.0, 1e-12);
  }
}

TEST(ObjectiveThm1, MatchesFullJointOracle) {
  Rng rng = make_rng(2);
  for (int t = 0; t < 20; ++t) {
    const Avwtc ch = random_instance(100 + t, 3);
    const auto q = random_joint_input(rng, 2);
    const Pmf q_s = random_pmf(3, rng);
    EXPECT_NEAR(objective_thm1(q, q_s, ch), full_joint_objective(q, q_s, ch), 1e-12);
  }
}

TEST(ObjectiveThm1, BsbeReductionAgrees) {
  const Avwtc ch = bsbe_channel();
  Rng rng = make_rng(3);
  for (int t = 0; t < 50; ++t) {
    const double eps = uniform01(rng), alpha = uniform01(rng);
    const auto q = random_joint_input(rng, 2);
    EXPECT_NEAR(objective_thm1(q, bsbe_state_pmf(eps, alpha), ch),
                bsbe_objective(q.table(), eps, alpha), 1e-12);
  }
}

TEST(ObjectiveThm1, ConstantEavesdropperLeaksNothing) {
  Rng rng = make_rng(4);
  const Dmc c = Dmc::constant(2, Pmf({0.3, 0.7}));
  const Avwtc ch({random_dmc(2, 2, rng), random_dmc(2, 2, rng)}, {c, c});
  const auto q = random_joint_input(rng, 2);
  const Pmf q_s({0.4, 0.6});
  const auto terms = thm1_terms(q, q_s, ch);
  EXPECT_NEAR(terms.i_uz_given_s, 0.0, 1e-15);
  EXPECT_NEAR(objective_thm1(q, q_s, ch), terms.i_uy, 1e-15);
  EXPECT_GT(terms.i_uy, 0.0);
}

TEST(ObjectiveThm1, RejectsShapeMismatch) {
  EXPECT_THROW(objective_thm1(JointInput::identity(3), bsbe_state_pmf(0.1, 0.1), bsbe_channel()),
               std::invalid_argument);
  EXPECT_THROW(objective_thm1(JointInput::identity(2), Pmf({0.5, 0.5}), bsbe_channel()),
               std::invalid_argument);
}

TEST(JointInput, EnforcesCardinalityCaps) {
  EXPECT_THROW(JointInput(3, 2, std::vector<double>(6, 1.0 / 6)), std::invalid_argument);
  EXPECT_THROW(JointAuxInput(4, 2, 2, std::vector<double>(16, 1.0 / 16)), std::invalid_argument);
  EXPECT_NO_THROW(JointAuxInput(3, 2, 2, std::vector<double>(12, 1.0 / 12)));
}

TEST(CapacityThm1, BsbeReferenceValues) {
  const Avwtc ch = bsbe_channel();
  const auto cfg = quick_config();
  EXPECT_NEAR(capacity_thm1(ch, bsbe_state_pmf(0.1, 0.3), cfg).value, 0.0, 1e-4);
  EXPECT_NEAR(capacity_thm1(ch, bsbe_state_pmf(0.0, 1.0), cfg).value, 1.0, 1e-6);
  EXPECT_NEAR(capacity_thm1(ch, bsbe_state_pmf(0.1, 1.0), cfg).value,
              1.0 - binary_entropy(0.1), 1e-6);
}

TEST(CapacityThm1, RawValueIsObjectiveAtArgmax) {
  const Avwtc ch = random_instance(7);
  const Pmf q_s({0.3, 0.7});
  const auto r = capacity_thm1(ch, q_s, quick_config());
  EXPECT_NEAR(r.raw, objective_thm1(r.argmax, q_s, ch), 1e-10);
  EXPECT_GE(r.value, 0.0);
}

TEST(CapacityThm1, InvariantToRelabelingU) {
  const Avwtc ch = random_instance(8);
  const Pmf q_s({0.55, 0.45});
  const auto r = capacity_thm1(ch, q_s, quick_config());
  const auto& t = r.argmax.table();
  const JointInput swapped(2, 2, {t[2], t[3], t[0], t[1]});
  EXPECT_NEAR(objective_thm1(swapped, q_s, ch), objective_thm1(r.argmax, q_s, ch), 1e-10);
}

TEST(CapacityThm1, DeterministicAndMonotoneInRestarts) {
  const Avwtc ch = random_instance(9);
  const Pmf q_s({0.5, 0.5});
  auto cfg = quick_config(5);
  const auto a = capacity_thm1(ch, q_s, cfg);
  const auto b = capacity_thm1(ch, q_s, cfg);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.argmax.table(), b.argmax.table());
  cfg.restarts = 16;
  EXPECT_GE(capacity_thm1(ch, q_s, cfg).raw, a.raw);
}

TEST(ConstraintSet, BoxVerticesAndMembership) {
  const auto box = ConstraintSet::box(Pmf({0.5, 0.5}), 0.2);
  ASSERT_EQ(box.vertices().size(), 2u);
  EXPECT_TRUE(box.contains(Pmf({0.45, 0.55})));
  EXPECT_FALSE(box.contains(Pmf({0.35, 0.65})));
  for (const auto& v : box.vertices()) EXPECT_NEAR(std::abs(v[0] - 0.5), 0.1, 1e-12);

  const auto zero = ConstraintSet::box(Pmf({0.2, 0.3, 0.5}), 0.0);
  ASSERT_EQ(zero.vertices().size(), 1u);
  EXPECT_THROW(ConstraintSet::box(Pmf({0.5, 0.5}), -0.1), std::invalid_argument);
  EXPECT_THROW(ConstraintSet::polytope({}), std::invalid_argument);
}

TEST(ConstraintSet, ThreeStateBoxVerticesSatisfyBounds) {
  const Pmf c({0.2, 0.3, 0.5});
  const auto box = ConstraintSet::box(c, 0.3);
  EXPECT_GE(box.vertices().size(), 3u);
  for (const auto& v : box.vertices()) EXPECT_TRUE(box.contains(v, 1e-12));
}

TEST(MinimizeOverSet, ConvexQuadraticOnThreeStateBox) {
  const auto box = ConstraintSet::box(Pmf({0.2, 0.3, 0.5}), 0.5);
  // Unconstrained minimizer (0.45, *, *) lies outside; the optimum sits on
  // the face q0 = 0.3.
  auto g = [](const Pmf& q) { return (q[0] - 0.45) * (q[0] - 0.45) + (q[1] - 0.3) * (q[1] - 0.3); };
  const auto r = minimize_over_set(g, box, quick_config());
  EXPECT_NEAR(r.point[0], 0.3, 1e-4);
  EXPECT_NEAR(r.point[1], 0.3, 1e-4);
  EXPECT_NEAR(r.value, 0.0225, 1e-7);
  EXPECT_LT(r.gap, 1e-4);
}

TEST(MinimizeOverSet, SegmentMatchesDenseScan) {
  const auto box = ConstraintSet::box(Pmf({0.4, 0.6}), 0.5);
  auto g = [](const Pmf& q) { return std::cosh(4.0 * (q[0] - 0.33)); };
  const auto r = minimize_over_set(g, box, quick_config());
  EXPECT_NEAR(r.point[0], 0.33, 1e-6);
  EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Bounds, SingletonAgreesWithCapacity) {
  for (std::uint64_t seed : {21u, 22u}) {
    const Avwtc ch = random_instance(seed);
    const Pmf q_s({0.35, 0.65});
    const auto cfg = quick_config();
    const double cap = capacity_thm1(ch, q_s, cfg).value;
    const auto set = ConstraintSet::singleton(q_s);
    const auto lb = lower_bound_thm2(ch, set, cfg);
    const auto ub = upper_bound_thm3(ch, set, cfg);
    EXPECT_NEAR(lb.value, cap, 5e-3);
    EXPECT_NEAR(ub.value, cap, 5e-3);
    EXPECT_EQ(lb.inner_argmin, q_s);
  }
}

TEST(Bounds, ZeroWidthBoxEqualsSingleton) {
  const Avwtc ch = random_instance(23);
  const Pmf q_s({0.6, 0.4});
  const auto cfg = quick_config();
  EXPECT_NEAR(lower_bound_thm2(ch, ConstraintSet::box(q_s, 0.0), cfg).raw,
              lower_bound_thm2(ch, ConstraintSet::singleton(q_s), cfg).raw, 1e-12);
}

TEST(Bounds, LowerBoundNonincreasingInDelta) {
  const Avwtc ch = random_instance(24);
  const Pmf q_s({0.45, 0.55});
  const auto cfg = quick_config();
  // Walk delta downward, seeding each run with the previous argmax (which
  // stays feasible and can only score higher on the smaller set).
  double previous = -kInfinity;
  std::vector<std::vector<double>> seeds;
  for (double delta : {0.2, 0.1, 0.05, 0.01}) {
    const auto lb = lower_bound_thm2(ch, ConstraintSet::box(q_s, delta), cfg, seeds);
    EXPECT_GE(lb.raw, previous - 1e-12) << "delta " << delta;
    previous = lb.raw;
    seeds = {lb.argmax};
  }
}

TEST(Bounds, SandwichOnBoxSets) {
  for (std::uint64_t seed : {31u, 32u}) {
    const Avwtc ch = random_instance(seed);
    const Pmf q_s({0.5, 0.5});
    const auto cfg = quick_config();
    const auto set = ConstraintSet::box(q_s, 0.2);
    const auto lb = lower_bound_thm2(ch, set, cfg);
    const auto ub = upper_bound_thm3(ch, set, cfg, {lb.argmax});
    EXPECT_LE(lb.raw, ub.raw + lb.tolerance + ub.tolerance);
  }
}

TEST(Bounds, UpperBoundRejectsLargeInputAlphabet) {
  Rng rng = make_rng(5);
  const Avwtc ch({random_dmc(4, 2, rng)}, {random_dmc(4, 2, rng)});
  EXPECT_THROW(upper_bound_thm3(ch, ConstraintSet::singleton(Pmf({1.0})), quick_config()),
               FeasibilityError);
}

TEST(Bsbe, ReferencePoints) {
  const auto cfg = quick_config();
  EXPECT_NEAR(bsbe_capacity(0.1, 0.36, cfg).value, 0.0, 1e-4);
  EXPECT_EQ(bsbe_capacity(0.1, 0.3, cfg).value, 0.0);
  EXPECT_NEAR(bsbe_capacity(0.0, 1.0, cfg).value, 1.0, 1e-9);
  EXPECT_GT(bsbe_capacity(0.1, 0.4, cfg).value, 1e-3);
  const auto r = bsbe_capacity(0.2, 0.8, cfg);
  EXPECT_FALSE(r.paths_disagree);
}

TEST(Bsbe, ZeroBelowCurveAndPositiveAbove) {
  const auto cfg = quick_config();
  for (double eps : {0.05, 0.15, 0.3, 0.45}) {
    const double a = 4.0 * eps * (1.0 - eps);
    EXPECT_EQ(bsbe_capacity(eps, std::max(0.0, a - 0.05), cfg).value, 0.0) << eps;
    if (a + 0.05 <= 1.0) {
      EXPECT_GT(bsbe_capacity(eps, a + 0.05, cfg).value, 0.0) << eps;
    }
  }
}

TEST(Bsbe, MonotoneInAlphaAndSymmetricInEps) {
  const auto cfg = quick_config();
  for (double eps : {0.0, 0.1, 0.2, 0.35}) {
    double previous = -1.0;
    for (int i = 0; i <= 10; ++i) {
      const double alpha = 0.1 * i;
      const double v = bsbe_capacity(eps, alpha, cfg).value;
      EXPECT_GE(v, previous - 1e-9) << eps << " " << alpha;
      EXPECT_NEAR(v, bsbe_capacity(1.0 - eps, alpha, cfg).value, 1e-7) << eps << " " << alpha;
      previous = v;
    }
  }
}

TEST(Bsbe, LocalSearchDominatesGridOracle) {
  const auto cfg = quick_config();
  for (double eps : {0.05, 0.2, 0.4}) {
    for (double alpha : {0.3, 0.6, 0.9}) {
      const double grid = bsbe_capacity_grid(eps, alpha, 30);
      const double opt = bsbe_capacity(eps, alpha, cfg).value;
      EXPECT_GE(opt, grid - 1e-12) << eps << " " << alpha;
      EXPECT_LE(opt - grid, 5e-3) << eps << " " << alpha;
    }
  }
}

TEST(Bsbe, RejectsOutOfRange) {
  EXPECT_THROW(bsbe_capacity(-0.1, 0.5, quick_config()), std::invalid_argument);
  EXPECT_THROW(bsbe_capacity(0.1, 1.5, quick_config()), std::invalid_argument);
}

TEST(AveragedMi, EqualityAtTheMinimizer) {
  Rng rng = make_rng(6);
  const std::vector<Dmc> family{random_dmc(2, 2, rng), random_dmc(2, 2, rng)};
  const Pmf q_x({0.3, 0.7});
  const Pmf q({0.4, 0.6});
  const auto c = averaged_mi_inequality_check(family, q, q, q_x);
  EXPECT_NEAR(c.lhs, c.rhs, 1e-12);
  EXPECT_TRUE(c.holds);
}

TEST(AveragedMi, HoldsAcrossBoxSet) {
  Rng rng = make_rng(7);
  const std::vector<Dmc> family{random_dmc(2, 2, rng), random_dmc(2, 2, rng)};
  const Pmf q_x({0.5, 0.5});
  const auto set = ConstraintSet::box(Pmf({0.5, 0.5}), 0.4);
  const auto tilde = minimize_mi_over_set(family, q_x, set, quick_config());
  for (int t = 0; t < 50; ++t) {
    const double a = 0.3 + 0.4 * uniform01(rng);
    const auto c = averaged_mi_inequality_check(family, tilde.q_tilde, Pmf({a, 1.0 - a}), q_x);
    EXPECT_TRUE(c.holds) << c.lhs << " < " << c.rhs;
  }
}

TEST(AveragedMi, DegenerateFamilyGivesEquality) {
  Rng rng = make_rng(8);
  const Dmc w = random_dmc(3, 2, rng);
  const std::vector<Dmc> family{w, w, w};
  const Pmf q_x({0.2, 0.5, 0.3});
  const auto c = averaged_mi_inequality_check(family, Pmf({0.1, 0.2, 0.7}),
                                              Pmf({0.5, 0.25, 0.25}), q_x);
  EXPECT_NEAR(c.lhs, mutual_info(q_x, w), 1e-12);
  EXPECT_NEAR(c.rhs, mutual_info(q_x, w), 1e-12);
}

}  // namespace
}  // namespace avwtc
