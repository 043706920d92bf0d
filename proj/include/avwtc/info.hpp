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

// Information measures over finite alphabets. Every quantity is in bits.
// Divergences signal a support violation by returning +infinity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "avwtc/prob.hpp"

namespace avwtc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double bits_to_nats(double bits) { return bits * std::numbers::ln2; }
inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

/// A joint PMF over a product of finite alphabets, stored row-major (last
/// axis fastest).
class JointPmf {
 public:
  JointPmf(std::vector<std::size_t> dims, std::vector<double> table)
      : dims_(std::move(dims)), t_(std::move(table)) {
    if (dims_.empty()) throw std::invalid_argument("JointPmf: no axes");
    std::size_t total = 1;
    for (std::size_t d : dims_) {
      if (d == 0) throw std::invalid_argument("JointPmf: empty axis");
      total *= d;
    }
    if (total != t_.size()) throw std::invalid_argument("JointPmf: table size mismatch");
    double sum = 0.0;
    for (double v : t_) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("JointPmf: entries must be finite and >= 0");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kPmfTolerance) {
      throw std::invalid_argument("JointPmf: entries do not sum to 1");
    }
  }

  /// Joint law of (X, Y) with X ~ p and Y | X ~ w.
  static JointPmf from_channel(const Pmf& p, const Dmc& w) {
    if (p.size() != w.input_size()) {
      throw std::invalid_argument("JointPmf::from_channel: shape mismatch");
    }
    std::vector<double> t(p.size() * w.output_size());
    for (std::size_t x = 0; x < p.size(); ++x) {
      for (std::size_t y = 0; y < w.output_size(); ++y) {
        t[x * w.output_size() + y] = p[x] * w(x, y);
      }
    }
    return JointPmf({p.size(), w.output_size()}, std::move(t));
  }

  static JointPmf product(const Pmf& a, const Pmf& b) {
    std::vector<double> t(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) t[i * b.size() + j] = a[i] * b[j];
    }
    return JointPmf({a.size(), b.size()}, std::move(t));
  }

  std::size_t rank() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& table() const { return t_; }

  /// Marginal over the listed axes, in the listed order.
  JointPmf marginal(const std::vector<std::size_t>& axes) const {
    return JointPmf(Marginalize(axes));
  }

  /// The full table flattened into a single-axis PMF.
  Pmf flat() const { return Pmf(t_); }

  /// Marginal PMF of one axis.
  Pmf axis_pmf(std::size_t axis) const { return Pmf(Marginalize({axis}).second); }

 private:
  explicit JointPmf(std::pair<std::vector<std::size_t>, std::vector<double>> parts)
      : dims_(std::move(parts.first)), t_(std::move(parts.second)) {}

  std::pair<std::vector<std::size_t>, std::vector<double>> Marginalize(
      const std::vector<std::size_t>& axes) const {
    if (axes.empty()) throw std::invalid_argument("JointPmf::marginal: no axes");
    std::vector<bool> seen(dims_.size(), false);
    std::vector<std::size_t> out_dims;
    for (std::size_t a : axes) {
      if (a >= dims_.size() || seen[a]) {
        throw std::invalid_argument("JointPmf::marginal: bad axis list");
      }
      seen[a] = true;
      out_dims.push_back(dims_[a]);
    }
    // Stride of each kept axis inside the output table.
    std::vector<std::size_t> out_stride(dims_.size(), 0);
    std::size_t stride = 1;
    for (std::size_t i = axes.size(); i-- > 0;) {
      out_stride[axes[i]] = stride;
      stride *= dims_[axes[i]];
    }
    std::vector<double> out(stride, 0.0);
    std::vector<std::size_t> idx(dims_.size(), 0);
    for (std::size_t flat = 0; flat < t_.size(); ++flat) {
      std::size_t o = 0;
      for (std::size_t d = 0; d < dims_.size(); ++d) o += idx[d] * out_stride[d];
      out[o] += t_[flat];
      for (std::size_t d = dims_.size(); d-- > 0;) {
        if (++idx[d] < dims_[d]) break;
        idx[d] = 0;
      }
    }
    return {std::move(out_dims), std::move(out)};
  }

  std::vector<std::size_t> dims_;
  std::vector<double> t_;
};

/// Shannon entropy in bits of a raw probability vector (0 log 0 = 0).
inline double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return std::max(0.0, h);
}

inline double entropy(const Pmf& p) { return entropy_of(p.probs()); }
inline double entropy(const JointPmf& j) { return entropy_of(j.table()); }

/// Binary entropy function h(p).
inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  return entropy_of(std::vector<double>{p, 1.0 - p});
}

inline std::vector<std::size_t> concat_axes(const std::vector<std::size_t>& a,
                                            const std::vector<std::size_t>& b) {
  std::vector<std::size_t> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

/// I(A;B) for groups of axes A and B of j.
inline double mutual_info(const JointPmf& j, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b) {
  const double v = entropy(j.marginal(a)) + entropy(j.marginal(b)) -
                   entropy(j.marginal(concat_axes(a, b)));
  return std::max(0.0, v);
}

/// I(A;B) of a two-axis joint PMF.
inline double mutual_info(const JointPmf& j) {
  if (j.rank() != 2) throw std::invalid_argument("mutual_info: need exactly two axes");
  return mutual_info(j, {0}, {1});
}

/// I(A;B|C) for groups of axes.
inline double cond_mutual_info(const JointPmf& j, const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b,
                               const std::vector<std::size_t>& c) {
  if (c.empty()) return mutual_info(j, a, b);
  const double v = entropy(j.marginal(concat_axes(a, c))) +
                   entropy(j.marginal(concat_axes(b, c))) -
                   entropy(j.marginal(concat_axes(concat_axes(a, b), c))) -
                   entropy(j.marginal(c));
  return std::max(0.0, v);
}

/// I(A;B|C) of a three-axis joint PMF ordered (A, B, C).
inline double cond_mutual_info(const JointPmf& j) {
  if (j.rank() != 3) throw std::invalid_argument("cond_mutual_info: need exactly three axes");
  return cond_mutual_info(j, {0}, {1}, {2});
}

/// I(X;Y) for input p through channel w.
inline double mutual_info(const Pmf& p, const Dmc& w) {
  return mutual_info(JointPmf::from_channel(p, w));
}

namespace detail {

inline void require_same_size(std::span<const double> p, std::span<const double> q,
                              const char* who) {
  if (p.size() != q.size()) {
    throw std::invalid_argument(std::string(who) + ": alphabet sizes differ");
  }
}

inline double kl_raw(std::span<const double> p, std::span<const double> q) {
  require_same_size(p, q, "kl_divergence");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInfinity;
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(0.0, d);
}

inline double renyi_raw(std::span<const double> p, std::span<const double> q, double eta) {
  require_same_size(p, q, "renyi_divergence");
  if (std::isnan(eta) || eta <= 1.0) {
    throw std::invalid_argument("renyi_divergence: order must exceed 1");
  }
  // r_i = ln(p_i / q_i) on the support of p.
  std::vector<double> r;
  std::vector<double> w;
  double r_max = -kInfinity;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInfinity;
    r.push_back(std::log(p[i]) - std::log(q[i]));
    w.push_back(p[i]);
    r_max = std::max(r_max, r.back());
  }
  if (std::isinf(eta)) return std::max(0.0, nats_to_bits(r_max));
  const double a = eta - 1.0;
  double log_sum;
  if (a * r_max < 1.0) {
    // sum p e^{a r} = 1 + sum p expm1(a r): accurate as eta approaches 1.
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += w[i] * std::expm1(a * r[i]);
    log_sum = std::log1p(s);
  } else {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += w[i] * std::exp(a * (r[i] - r_max));
    log_sum = a * r_max + std::log(s);
  }
  return std::max(0.0, nats_to_bits(log_sum / a));
}

}  // namespace detail

/// D(p || q) in bits; +infinity when supp(p) is not inside supp(q).
inline double kl_divergence(const Pmf& p, const Pmf& q) {
  return detail::kl_raw(p.probs(), q.probs());
}

inline double total_variation(const Pmf& p, const Pmf& q) {
  detail::require_same_size(p.probs(), q.probs(), "total_variation");
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) t += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * t);
}

/// Renyi divergence of order eta > 1 in bits:
///   (1/(eta-1)) log2 sum_a p(a)^eta q(a)^(1-eta).
/// eta = +infinity gives the max-divergence log2 max_a p(a)/q(a).
inline double renyi_divergence(const Pmf& p, const Pmf& q, double eta) {
  return detail::renyi_raw(p.probs(), q.probs(), eta);
}

/// D(j || product of the marginals of axis groups a and b).
inline double divergence_from_product(const JointPmf& j, const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b, double eta) {
  const JointPmf ja = j.marginal(a);
  const JointPmf jb = j.marginal(b);
  const JointPmf jab = j.marginal(concat_axes(a, b));
  const auto& pa = ja.table();
  const auto& pb = jb.table();
  std::vector<double> prod(pa.size() * pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t k = 0; k < pb.size(); ++k) prod[i * pb.size() + k] = pa[i] * pb[k];
  }
  if (eta == 1.0) return detail::kl_raw(jab.table(), prod);
  return detail::renyi_raw(jab.table(), prod, eta);
}

}  // namespace avwtc
