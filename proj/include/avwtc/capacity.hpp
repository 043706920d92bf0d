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

// Single-letter secrecy formulas for type-constrained arbitrarily varying
// wiretap channels:
//
//   capacity        max_{Q_UX} I(U;Y) - I(U;Z|S)            (state type fixed)
//   lower bound     max_{Q_UX} [min_{Q in set} I(U;Y) - max_{Q in set} I(U;Z|S)]
//   upper bound     max_{Q_VUX} inf_{Q in set} [I(U;Y|V) - I(U;Z|S,V)]
//
// Y sees the averaged main channel W_Q = sum_s Q(s) W_s; the eavesdropper term
// is sum_s Q(s) I_{V_s}(U;Z), linear in Q. The outer maximizations are
// nonconcave and solved heuristically with restarts; the inner problems over
// the state set are convex and solved by scan plus refinement.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "avwtc/errors.hpp"
#include "avwtc/info.hpp"
#include "avwtc/prob.hpp"
#include "avwtc/simplex_opt.hpp"

namespace avwtc {

/// Optimized values with |raw| below this are reported as exactly zero.
inline constexpr double kZeroClampTolerance = 1e-6;

inline double clamp_zero(double raw) {
  return std::abs(raw) < kZeroClampTolerance ? 0.0 : raw;
}

/// Joint PMF Q_{U,X}, row-major with X fastest, |U| <= |X|.
class JointInput {
 public:
  JointInput(std::size_t u_size, std::size_t x_size, std::vector<double> table)
      : u_(u_size), x_(x_size), t_(std::move(table)) {
    if (u_ == 0 || x_ == 0) throw std::invalid_argument("JointInput: empty alphabet");
    if (u_ > x_) throw std::invalid_argument("JointInput: |U| must not exceed |X|");
    if (t_.size() != u_ * x_) throw std::invalid_argument("JointInput: table size mismatch");
    Pmf check(t_);
  }

  /// U uniform and X = U.
  static JointInput identity(std::size_t x_size) {
    std::vector<double> t(x_size * x_size, 0.0);
    for (std::size_t u = 0; u < x_size; ++u) t[u * x_size + u] = 1.0 / static_cast<double>(x_size);
    return JointInput(x_size, x_size, std::move(t));
  }

  std::size_t u_size() const { return u_; }
  std::size_t x_size() const { return x_; }
  const std::vector<double>& table() const { return t_; }
  double operator()(std::size_t u, std::size_t x) const { return t_[u * x_ + x]; }

 private:
  std::size_t u_;
  std::size_t x_;
  std::vector<double> t_;
};

/// Joint PMF Q_{V,U,X} with |U| <= |X| and |V| <= |X|^2 - 1.
class JointAuxInput {
 public:
  JointAuxInput(std::size_t v_size, std::size_t u_size, std::size_t x_size,
                std::vector<double> table)
      : v_(v_size), u_(u_size), x_(x_size), t_(std::move(table)) {
    if (v_ == 0 || u_ == 0 || x_ == 0) throw std::invalid_argument("JointAuxInput: empty alphabet");
    if (u_ > x_) throw std::invalid_argument("JointAuxInput: |U| must not exceed |X|");
    if (v_ > std::max<std::size_t>(1, x_ * x_ - 1)) {
      throw std::invalid_argument("JointAuxInput: |V| must not exceed |X|^2 - 1");
    }
    if (t_.size() != v_ * u_ * x_) throw std::invalid_argument("JointAuxInput: table size mismatch");
    Pmf check(t_);
  }

  std::size_t v_size() const { return v_; }
  std::size_t u_size() const { return u_; }
  std::size_t x_size() const { return x_; }
  const std::vector<double>& table() const { return t_; }

 private:
  std::size_t v_;
  std::size_t u_;
  std::size_t x_;
  std::vector<double> t_;
};

// ---------------------------------------------------------------------------
// Constraint sets over state PMFs.

struct SingletonSet {
  Pmf point;
};

/// {P : |P(s) - center(s)| <= delta * center(s) for all s}.
struct BoxSet {
  Pmf center;
  double delta = 0.0;
};

/// Convex hull of the listed vertices.
struct PolytopeSet {
  std::vector<Pmf> vertices;
};

class ConstraintSet {
 public:
  using Variant = std::variant<SingletonSet, BoxSet, PolytopeSet>;

  ConstraintSet(Variant v) : v_(std::move(v)) {  // NOLINT: implicit by design
    if (auto* box = std::get_if<BoxSet>(&v_)) {
      if (!(box->delta >= 0.0)) throw std::invalid_argument("Box constraint: delta must be >= 0");
    }
    if (auto* poly = std::get_if<PolytopeSet>(&v_)) {
      if (poly->vertices.empty()) throw std::invalid_argument("Polytope constraint: no vertices");
      for (const auto& p : poly->vertices) {
        if (p.size() != poly->vertices.front().size()) {
          throw std::invalid_argument("Polytope constraint: vertices differ in size");
        }
      }
    }
    vertices_ = compute_vertices();
  }

  static ConstraintSet singleton(Pmf p) { return ConstraintSet(SingletonSet{std::move(p)}); }
  static ConstraintSet box(Pmf center, double delta) {
    return ConstraintSet(BoxSet{std::move(center), delta});
  }
  static ConstraintSet polytope(std::vector<Pmf> vertices) {
    return ConstraintSet(PolytopeSet{std::move(vertices)});
  }

  const Variant& variant() const { return v_; }
  std::size_t state_count() const { return vertices_.front().size(); }

  /// Extreme points of the set (deduplicated).
  const std::vector<Pmf>& vertices() const { return vertices_; }

  bool contains(const Pmf& p, double tol = 1e-12) const {
    if (p.size() != state_count()) return false;
    if (const auto* box = std::get_if<BoxSet>(&v_)) {
      for (std::size_t s = 0; s < p.size(); ++s) {
        if (std::abs(p[s] - box->center[s]) > box->delta * box->center[s] + tol) return false;
      }
      return true;
    }
    if (vertices_.size() == 1) {
      for (std::size_t s = 0; s < p.size(); ++s) {
        if (std::abs(p[s] - vertices_[0][s]) > tol) return false;
      }
      return true;
    }
    throw std::invalid_argument("ConstraintSet::contains: only box and singleton sets");
  }

 private:
  std::vector<Pmf> compute_vertices() const {
    if (const auto* single = std::get_if<SingletonSet>(&v_)) return {single->point};
    if (const auto* poly = std::get_if<PolytopeSet>(&v_)) return dedupe(poly->vertices);
    const auto& box = std::get<BoxSet>(v_);
    const std::size_t k = box.center.size();
    std::vector<double> lo(k), hi(k);
    for (std::size_t s = 0; s < k; ++s) {
      lo[s] = std::max(0.0, box.center[s] * (1.0 - box.delta));
      hi[s] = std::min(1.0, box.center[s] * (1.0 + box.delta));
    }
    // A vertex of {lo <= P <= hi, sum P = 1} has every coordinate but one at
    // a bound; the free one is fixed by the sum constraint.
    std::vector<Pmf> out;
    for (std::size_t free = 0; free < k; ++free) {
      const std::size_t patterns = std::size_t{1} << (k - 1);
      for (std::size_t mask = 0; mask < patterns; ++mask) {
        std::vector<double> p(k);
        double others = 0.0;
        std::size_t bit = 0;
        for (std::size_t s = 0; s < k; ++s) {
          if (s == free) continue;
          p[s] = (mask >> bit++) & 1U ? hi[s] : lo[s];
          others += p[s];
        }
        const double rest = 1.0 - others;
        if (rest < lo[free] - 1e-12 || rest > hi[free] + 1e-12) continue;
        p[free] = std::clamp(rest, lo[free], hi[free]);
        out.push_back(Pmf::normalized(std::move(p)));
      }
    }
    if (out.empty()) throw FeasibilityError("Box constraint has no feasible point");
    return dedupe(out);
  }

  static std::vector<Pmf> dedupe(const std::vector<Pmf>& in) {
    std::vector<Pmf> out;
    for (const auto& p : in) {
      const bool dup = std::any_of(out.begin(), out.end(), [&](const Pmf& q) {
        for (std::size_t s = 0; s < p.size(); ++s) {
          if (std::abs(p[s] - q[s]) > 1e-12) return false;
        }
        return true;
      });
      if (!dup) out.push_back(p);
    }
    return out;
  }

  Variant v_;
  std::vector<Pmf> vertices_;
};

// ---------------------------------------------------------------------------
// Inner convex minimization over a constraint set.

struct InnerMinResult {
  Pmf point;
  double value;
  /// Frank-Wolfe duality gap at `point`: value minus the true minimum is at
  /// most this (up to finite-difference error) when the objective is convex.
  double gap;
};

namespace detail {

inline Pmf mix_vertices(const std::vector<Pmf>& vertices, std::span<const double> lambda) {
  std::vector<double> p(vertices.front().size(), 0.0);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (lambda[i] == 0.0) continue;
    for (std::size_t s = 0; s < p.size(); ++s) p[s] += lambda[i] * vertices[i][s];
  }
  return Pmf::normalized(std::move(p));
}

inline Pmf segment_point(const Pmf& a, const Pmf& b, double t) {
  std::vector<double> p(a.size());
  for (std::size_t s = 0; s < p.size(); ++s) p[s] = (1.0 - t) * a[s] + t * b[s];
  return Pmf::normalized(std::move(p));
}

// Largest barycentric grid resolution whose point count stays manageable.
inline constexpr std::uint64_t kMaxInnerGridPoints = 200;

inline double frank_wolfe_gap(const std::function<double(const Pmf&)>& g, const Pmf& x,
                              double gx, const std::vector<Pmf>& vertices,
                              std::size_t* best_vertex = nullptr) {
  const double h = 1e-7;
  double gap = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double slope = (g(segment_point(x, vertices[i], h)) - gx) / h;
    if (-slope > gap) {
      gap = -slope;
      if (best_vertex) *best_vertex = i;
    }
  }
  return gap;
}

}  // namespace detail

/// Minimizes a convex function of the state PMF over a constraint set.
inline InnerMinResult minimize_over_set(const std::function<double(const Pmf&)>& g,
                                        const ConstraintSet& set, const OptimizerConfig& cfg) {
  const auto& vs = set.vertices();
  if (vs.size() == 1) return {vs[0], g(vs[0]), 0.0};
  const double golden_tol = 1e-9;
  if (vs.size() == 2) {
    const std::size_t r = cfg.inner_grid_resolution;
    std::size_t best_i = 0;
    double best = kInfinity;
    for (std::size_t i = 0; i <= r; ++i) {
      const double v = g(detail::segment_point(vs[0], vs[1], static_cast<double>(i) / r));
      if (v < best) {
        best = v;
        best_i = i;
      }
    }
    const double lo = static_cast<double>(best_i == 0 ? 0 : best_i - 1) / r;
    const double hi = static_cast<double>(std::min(r, best_i + 1)) / r;
    auto [t, v] = golden_section_min(
        [&](double t) { return g(detail::segment_point(vs[0], vs[1], t)); }, lo, hi, golden_tol);
    double t_best = static_cast<double>(best_i) / r;
    if (v < best) {
      best = v;
      t_best = t;
    }
    Pmf x = detail::segment_point(vs[0], vs[1], t_best);
    const double gap = detail::frank_wolfe_gap(g, x, best, vs);
    return {std::move(x), best, gap};
  }

  // Barycentric grid over the vertices, then Frank-Wolfe from the best point.
  const std::size_t m = vs.size();
  std::size_t r = cfg.inner_grid_resolution;
  while (r > 1 && type_count(r, m) > detail::kMaxInnerGridPoints) --r;
  std::vector<double> best_lambda;
  double best = kInfinity;
  for (const auto& c : enumerate_compositions(r, m)) {
    std::vector<double> lambda(m);
    for (std::size_t i = 0; i < m; ++i) lambda[i] = static_cast<double>(c[i]) / r;
    const double v = g(detail::mix_vertices(vs, lambda));
    if (v < best) {
      best = v;
      best_lambda = std::move(lambda);
    }
  }
  Pmf x = detail::mix_vertices(vs, best_lambda);
  double gap = 0.0;
  for (std::size_t iter = 0; iter < 200; ++iter) {
    std::size_t target = 0;
    gap = detail::frank_wolfe_gap(g, x, best, vs, &target);
    if (gap < 1e-10) break;
    const Pmf from = x;
    auto [t, v] = golden_section_min(
        [&](double t) { return g(detail::segment_point(from, vs[target], t)); }, 0.0, 1.0,
        golden_tol);
    if (!(v < best)) break;
    best = v;
    x = detail::segment_point(from, vs[target], t);
  }
  gap = detail::frank_wolfe_gap(g, x, best, vs);
  return {std::move(x), best, gap};
}

// ---------------------------------------------------------------------------
// Mutual-information building blocks.

namespace detail {

/// I(A;B) in bits of a non-negative rows x cols table with total mass `mass`.
inline double mi_table(std::span<const double> t, std::size_t rows, std::size_t cols) {
  std::vector<double> pr(rows, 0.0), pc(cols, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      pr[a] += t[a * cols + b];
      pc[b] += t[a * cols + b];
      total += t[a * cols + b];
    }
  }
  if (total <= 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      const double p = t[a * cols + b];
      if (p <= 0.0) continue;
      mi += p * std::log2(p * total / (pr[a] * pc[b]));
    }
  }
  return std::max(0.0, mi / total);
}

/// I(U; out) when U, X ~ q (u_size x x_size, any positive total mass) and
/// out | X ~ channel.
inline double mi_u_out(std::span<const double> q, std::size_t u_size, std::size_t x_size,
                       const Dmc& channel) {
  const std::size_t y_size = channel.output_size();
  std::vector<double> joint(u_size * y_size, 0.0);
  for (std::size_t u = 0; u < u_size; ++u) {
    for (std::size_t x = 0; x < x_size; ++x) {
      const double w = q[u * x_size + x];
      if (w <= 0.0) continue;
      const auto row = channel.row(x);
      for (std::size_t y = 0; y < y_size; ++y) joint[u * y_size + y] += w * row[y];
    }
  }
  return mi_table(joint, u_size, y_size);
}

inline std::vector<double> normalized_copy(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  double total = 0.0;
  for (double& e : v) {
    e = std::max(0.0, e);
    total += e;
  }
  for (double& e : v) e /= total;
  return v;
}

/// Per-state eavesdropper information a_s = I_{V_s}(U;Z).
inline std::vector<double> eaves_terms(std::span<const double> q, std::size_t u_size,
                                       const Avwtc& ch) {
  std::vector<double> a(ch.state_count());
  for (std::size_t s = 0; s < a.size(); ++s) {
    a[s] = mi_u_out(q, u_size, ch.input_size(), ch.eaves()[s]);
  }
  return a;
}

inline double dot(std::span<const double> a, const Pmf& q) {
  double r = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) r += a[s] * q[s];
  return r;
}

inline std::vector<std::vector<double>> thm1_structured_starts(std::size_t x_size) {
  const std::size_t d = x_size * x_size;
  return {std::vector<double>(d, 1.0 / static_cast<double>(d)),
          JointInput::identity(x_size).table()};
}

inline void require_state_count(const Avwtc& ch, std::size_t k, const char* who) {
  if (ch.state_count() != k) {
    throw std::invalid_argument(std::string(who) + ": state PMF size " + std::to_string(k) +
                                " does not match the channel's " +
                                std::to_string(ch.state_count()) + " states");
  }
}

}  // namespace detail

/// Terms of the single-letter objective at a given Q_{U,X} and Q_S.
struct Thm1Terms {
  double i_uy;
  double i_uz_given_s;
  double value() const { return i_uy - i_uz_given_s; }
};

inline Thm1Terms thm1_terms(const JointInput& q_ux, const Pmf& q_s, const Avwtc& ch) {
  if (q_ux.x_size() != ch.input_size()) {
    throw std::invalid_argument("objective: Q_UX input alphabet does not match the channel");
  }
  detail::require_state_count(ch, q_s.size(), "objective");
  const Dmc w_avg = averaged_channel(ch.main(), q_s);
  const double i_uy = detail::mi_u_out(q_ux.table(), q_ux.u_size(), q_ux.x_size(), w_avg);

  // Build the (U, S, Z) marginal directly and evaluate the eavesdropper term
  // both as I(U;Z|S) and as I(U;S,Z); independence of U and S makes them equal.
  const std::size_t u_size = q_ux.u_size();
  const std::size_t k = ch.state_count();
  const std::size_t z_size = ch.eaves_output_size();
  std::vector<double> usz(u_size * k * z_size, 0.0);
  for (std::size_t u = 0; u < u_size; ++u) {
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t x = 0; x < q_ux.x_size(); ++x) {
        const double w = q_ux(u, x) * q_s[s];
        if (w <= 0.0) continue;
        for (std::size_t z = 0; z < z_size; ++z) {
          usz[(u * k + s) * z_size + z] += w * ch.eaves()[s](x, z);
        }
      }
    }
  }
  const JointPmf j({u_size, k, z_size}, Pmf::normalized(usz).vec());
  const double cond = cond_mutual_info(j, {0}, {2}, {1});
  const double joint = mutual_info(j, {0}, {1, 2});
  if (std::abs(cond - joint) > 1e-10) {
    throw std::logic_error("objective: I(U;Z|S) and I(U;S,Z) disagree");
  }
  return {i_uy, cond};
}

/// I(U;Y) - I(U;Z|S) under Q_{U,X} Q_S W_s V_s.
inline double objective_thm1(const JointInput& q_ux, const Pmf& q_s, const Avwtc& ch) {
  return thm1_terms(q_ux, q_s, ch).value();
}

struct CapacityResult {
  double value;  ///< clamped estimate
  double raw;    ///< best objective found
  JointInput argmax;
};

/// Estimate of max_{Q_UX} I(U;Y) - I(U;Z|S) with |U| = |X|.
inline CapacityResult capacity_thm1(const Avwtc& ch, const Pmf& q_s, const OptimizerConfig& cfg,
                                    const std::vector<std::vector<double>>& extra_starts = {}) {
  detail::require_state_count(ch, q_s.size(), "capacity_thm1");
  const std::size_t nx = ch.input_size();
  const Dmc w_avg = averaged_channel(ch.main(), q_s);
  auto f = [&](std::span<const double> raw) {
    const auto q = detail::normalized_copy(raw);
    return detail::mi_u_out(q, nx, nx, w_avg) - detail::dot(detail::eaves_terms(q, nx, ch), q_s);
  };
  auto starts = detail::thm1_structured_starts(nx);
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());
  auto best = maximize_on_simplex(f, nx * nx, cfg, starts);
  return {clamp_zero(best.value), best.value, JointInput(nx, nx, detail::normalized_copy(best.x))};
}

struct BoundResult {
  double value;      ///< clamped estimate
  double raw;        ///< best objective found
  double tolerance;  ///< optimizer tolerance plus inner-problem gap at the argmax
  std::vector<double> argmax;  ///< flattened Q_UX (lower) or Q_VUX (upper)
  std::vector<std::size_t> argmax_dims;
  Pmf inner_argmin;  ///< state PMF attaining the inner minimum at the argmax
};

/// Lower bound max_{Q_UX} [min_{Q1} I(U;Y) - max_{Q2} I(U;Z|S)].
inline BoundResult lower_bound_thm2(const Avwtc& ch, const ConstraintSet& set,
                                    const OptimizerConfig& cfg,
                                    const std::vector<std::vector<double>>& extra_starts = {}) {
  detail::require_state_count(ch, set.state_count(), "lower_bound_thm2");
  const std::size_t nx = ch.input_size();
  const auto& vs = set.vertices();
  auto inner = [&](std::span<const double> q) {
    return minimize_over_set(
        [&](const Pmf& qs) {
          return detail::mi_u_out(q, nx, nx, averaged_channel(ch.main(), qs));
        },
        set, cfg);
  };
  auto f = [&](std::span<const double> raw) {
    const auto q = detail::normalized_copy(raw);
    const auto a = detail::eaves_terms(q, nx, ch);
    double leak = -kInfinity;
    for (const auto& v : vs) leak = std::max(leak, detail::dot(a, v));
    return inner(q).value - leak;
  };
  auto starts = detail::thm1_structured_starts(nx);
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());
  auto best = maximize_on_simplex(f, nx * nx, cfg, starts);
  auto q = detail::normalized_copy(best.x);
  auto in = inner(q);
  return {clamp_zero(best.value), best.value, cfg.tolerance + in.gap, std::move(q),
          {nx, nx}, std::move(in.point)};
}

/// Largest input alphabet for which the upper bound is attempted.
inline constexpr std::size_t kUpperBoundMaxInput = 3;

/// Upper bound max_{Q_VUX} inf_{Q in set} [I(U;Y|V) - I(U;Z|S,V)].
///
/// Phase one restricts V to a single value (which reduces the objective to
/// inf_Q [I(U;Y) - I(U;Z|S)]); phase two optimizes the full joint starting
/// from the phase-one optimum. `qux_starts` seeds phase one with Q_UX tables.
inline BoundResult upper_bound_thm3(const Avwtc& ch, const ConstraintSet& set,
                                    const OptimizerConfig& cfg,
                                    const std::vector<std::vector<double>>& qux_starts = {}) {
  detail::require_state_count(ch, set.state_count(), "upper_bound_thm3");
  const std::size_t nx = ch.input_size();
  if (nx > kUpperBoundMaxInput) {
    throw FeasibilityError("upper_bound_thm3: |X| = " + std::to_string(nx) +
                           " exceeds the supported maximum of " +
                           std::to_string(kUpperBoundMaxInput));
  }
  const std::size_t nv = std::max<std::size_t>(1, nx * nx - 1);
  const std::size_t block = nx * nx;

  // inf over the set of sum_v q(v) [I(U;Y|V=v) - sum_s Q(s) a_{v,s}]; convex in Q.
  auto inner = [&](const std::vector<double>& q, std::size_t v_count) {
    std::vector<std::vector<double>> a(v_count);
    std::vector<double> weight(v_count, 0.0);
    for (std::size_t v = 0; v < v_count; ++v) {
      std::span<const double> sub(q.data() + v * block, block);
      for (double e : sub) weight[v] += e;
      if (weight[v] > 0.0) a[v] = detail::eaves_terms(sub, nx, ch);
    }
    return minimize_over_set(
        [&](const Pmf& qs) {
          const Dmc w_avg = averaged_channel(ch.main(), qs);
          double total = 0.0;
          for (std::size_t v = 0; v < v_count; ++v) {
            if (weight[v] <= 0.0) continue;
            std::span<const double> sub(q.data() + v * block, block);
            total += weight[v] * (detail::mi_u_out(sub, nx, nx, w_avg) - detail::dot(a[v], qs));
          }
          return total;
        },
        set, cfg);
  };

  auto phase1 = [&](std::span<const double> raw) {
    return inner(detail::normalized_copy(raw), 1).value;
  };
  auto starts = detail::thm1_structured_starts(nx);
  starts.insert(starts.end(), qux_starts.begin(), qux_starts.end());
  const auto p1 = maximize_on_simplex(phase1, block, cfg, starts);

  auto phase2 = [&](std::span<const double> raw) {
    return inner(detail::normalized_copy(raw), nv).value;
  };
  std::vector<double> embedded(nv * block, 0.0);
  const auto p1q = detail::normalized_copy(p1.x);
  std::copy(p1q.begin(), p1q.end(), embedded.begin());
  auto best = maximize_on_simplex(phase2, nv * block, cfg, {embedded});
  if (p1.value > best.value) best = {embedded, p1.value};

  auto q = detail::normalized_copy(best.x);
  auto in = inner(q, nv);
  return {clamp_zero(best.value), best.value, cfg.tolerance + in.gap, std::move(q),
          {nv, nx, nx}, std::move(in.point)};
}

// ---------------------------------------------------------------------------
// Binary symmetric main channel / binary erasure eavesdropper example.

/// Four-state channel with S = (S1, S2), state index 2*s1 + s2. W_{s1} is the
/// identity for s1 = 0 and the bit flip for s1 = 1; V_{s2} passes X noiselessly
/// to {0, 1, ?} for s2 = 0 and always outputs ? (symbol 2) for s2 = 1.
inline Avwtc bsbe_channel() {
  const Dmc identity = Dmc::identity(2);
  const Dmc flip(2, 2, {0.0, 1.0, 1.0, 0.0});
  const Dmc clear(2, 3, {1.0, 0.0, 0.0, 0.0, 1.0, 0.0});
  const Dmc erased(2, 3, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0});
  std::vector<Dmc> main, eaves;
  for (std::size_t s1 = 0; s1 < 2; ++s1) {
    for (std::size_t s2 = 0; s2 < 2; ++s2) {
      main.push_back(s1 == 0 ? identity : flip);
      eaves.push_back(s2 == 0 ? clear : erased);
    }
  }
  return Avwtc(std::move(main), std::move(eaves));
}

/// State type Q1 x Q2 with Q1(1) = eps, Q2(1) = alpha.
inline Pmf bsbe_state_pmf(double eps, double alpha) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("bsbe: eps outside [0,1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("bsbe: alpha outside [0,1]");
  std::vector<double> q(4);
  for (std::size_t s1 = 0; s1 < 2; ++s1) {
    for (std::size_t s2 = 0; s2 < 2; ++s2) {
      q[2 * s1 + s2] = (s1 ? eps : 1.0 - eps) * (s2 ? alpha : 1.0 - alpha);
    }
  }
  return Pmf::normalized(std::move(q));
}

/// I(U;Y) - (1 - alpha) I(U;X) for a binary Q_UX and a BSC(eps) main channel.
inline double bsbe_objective(std::span<const double> q_ux, double eps, double alpha) {
  const auto q = detail::normalized_copy(q_ux);
  return detail::mi_u_out(q, 2, 2, Dmc::bsc(eps)) -
         (1.0 - alpha) * detail::mi_u_out(q, 2, 2, Dmc::identity(2));
}

/// Q_UX with U uniform and X = U through a BSC(beta).
inline std::vector<double> bsbe_symmetric_input(double beta) {
  return {0.5 * (1.0 - beta), 0.5 * beta, 0.5 * beta, 0.5 * (1.0 - beta)};
}

struct BsbeResult {
  double value;            ///< clamped max of both paths
  double raw;              ///< max of both paths before clamping
  double full_value;       ///< general binary Q_UX optimization
  double symmetric_value;  ///< U uniform, X = U xor Bernoulli(beta)
  bool paths_disagree;     ///< |full - symmetric| > 1e-5
  std::vector<double> argmax;
};

inline BsbeResult bsbe_capacity(double eps, double alpha, const OptimizerConfig& cfg) {
  cfg.validate();
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("bsbe_capacity: eps outside [0,1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("bsbe_capacity: alpha outside [0,1]");
  }
  auto sym = [&](double beta) { return bsbe_objective(bsbe_symmetric_input(beta), eps, alpha); };
  const std::size_t r = cfg.inner_grid_resolution;
  std::size_t best_i = 0;
  double sym_best = -kInfinity;
  for (std::size_t i = 0; i <= r; ++i) {
    const double v = sym(0.5 * static_cast<double>(i) / r);
    if (v > sym_best) {
      sym_best = v;
      best_i = i;
    }
  }
  double beta_best = 0.5 * static_cast<double>(best_i) / r;
  {
    const double lo = 0.5 * static_cast<double>(best_i == 0 ? 0 : best_i - 1) / r;
    const double hi = 0.5 * static_cast<double>(std::min(r, best_i + 1)) / r;
    auto [b, v] = golden_section_max(sym, lo, hi, 1e-12);
    if (v > sym_best) {
      sym_best = v;
      beta_best = b;
    }
  }

  auto f = [&](std::span<const double> q) { return bsbe_objective(q, eps, alpha); };
  auto starts = detail::thm1_structured_starts(2);
  starts.push_back(bsbe_symmetric_input(beta_best));
  auto full = maximize_on_simplex(f, 4, cfg, starts);

  const bool sym_wins = sym_best > full.value;
  const double raw = sym_wins ? sym_best : full.value;
  return {clamp_zero(raw),
          raw,
          full.value,
          sym_best,
          std::abs(full.value - sym_best) > 1e-5,
          sym_wins ? bsbe_symmetric_input(beta_best) : detail::normalized_copy(full.x)};
}

/// Grid evaluation of the BS-BE objective over Q_U(1) = a, Q_{X|U}(1|0) = b,
/// Q_{X|U}(1|1) = c, each on {0, 1/r, ..., 1}. A verification mode for
/// bsbe_capacity: slower and coarser, but free of local-search assumptions.
inline double bsbe_capacity_grid(double eps, double alpha, std::size_t resolution) {
  if (resolution < 1) throw std::invalid_argument("bsbe_capacity_grid: resolution must be >= 1");
  bsbe_state_pmf(eps, alpha);  // range checks
  const double r = static_cast<double>(resolution);
  double best = -kInfinity;
  for (std::size_t i = 0; i <= resolution; ++i) {
    const double a = i / r;
    for (std::size_t j = 0; j <= resolution; ++j) {
      const double b = j / r;
      for (std::size_t k = 0; k <= resolution; ++k) {
        const double c = k / r;
        const std::vector<double> q{(1.0 - a) * (1.0 - b), (1.0 - a) * b, a * (1.0 - c), a * c};
        best = std::max(best, bsbe_objective(q, eps, alpha));
      }
    }
  }
  return clamp_zero(best);
}

// ---------------------------------------------------------------------------
// Averaged-channel information inequality.

struct InnerMinMi {
  Pmf q_tilde;
  double value;
  double gap;
};

/// argmin over the set of I(X;Y) under Q_X and the averaged channel W_Q.
inline InnerMinMi minimize_mi_over_set(const std::vector<Dmc>& family, const Pmf& q_x,
                                       const ConstraintSet& set, const OptimizerConfig& cfg) {
  auto r = minimize_over_set(
      [&](const Pmf& q) { return mutual_info(q_x, averaged_channel(family, q)); }, set, cfg);
  return {std::move(r.point), r.value, r.gap};
}

struct AveragedMiCheck {
  double lhs;  ///< sum Q_X W_Q log2(W_Qtilde / Qtilde_Y)
  double rhs;  ///< I(X;Y) under Q_X W_Qtilde
  bool holds;  ///< lhs >= rhs - 1e-9
};

inline AveragedMiCheck averaged_mi_inequality_check(const std::vector<Dmc>& family,
                                                    const Pmf& q_tilde, const Pmf& q,
                                                    const Pmf& q_x) {
  const Dmc w_t = averaged_channel(family, q_tilde);
  const Dmc w_q = averaged_channel(family, q);
  if (q_x.size() != w_t.input_size()) {
    throw std::invalid_argument("averaged_mi_inequality_check: Q_X size mismatch");
  }
  const Pmf y_t = w_t.output_pmf(q_x);
  double lhs = 0.0;
  for (std::size_t x = 0; x < q_x.size(); ++x) {
    for (std::size_t y = 0; y < w_q.output_size(); ++y) {
      const double p = q_x[x] * w_q(x, y);
      if (p <= 0.0) continue;
      if (w_t(x, y) <= 0.0) {
        lhs = -kInfinity;
        break;
      }
      lhs += p * std::log2(w_t(x, y) / y_t[y]);
    }
  }
  const double rhs = mutual_info(q_x, w_t);
  return {lhs, rhs, lhs >= rhs - 1e-9};
}

}  // namespace avwtc
