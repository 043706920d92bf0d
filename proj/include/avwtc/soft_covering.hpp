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

// Heterogeneous soft covering: a random codebook of floor(2^{nR}) words, each
// symbol u_t drawn from Q_{U|S=s_t}, is passed through Q_{V|U,S=s_t}. The
// induced output law is compared with the product reference Q^n_{V|S=s}.
//
// The exponent machinery evaluates, for delta in (0, R - I(U;V|S)),
//   gamma_delta = sup_{eta>1} (eta-1)/(2eta-1) (R - delta - max_s d_eta(s))
//   c_delta     = 3 log2(e) + 2 gamma_delta + 2 log2(max 1/Q_{V|S}(v|s))
// where d_eta(s) is the order-eta Renyi divergence between Q_{UV|S=s} and
// Q_{U|S=s} Q_{V|S=s}, and the probability that the divergence exceeds
// c_delta n 2^{-n gamma_delta} is at most (1 + |V|^n) exp(-2^{n delta} / 3).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avwtc/errors.hpp"
#include "avwtc/info.hpp"
#include "avwtc/prob.hpp"
#include "avwtc/rng.hpp"
#include "avwtc/simplex_opt.hpp"

namespace avwtc {

struct SoftCoverProblem {
  Dmc q_us;                ///< Q_{U|S}: states -> U
  std::vector<Dmc> q_vus;  ///< Q_{V|U,S=s}: U -> V, one per state
  Sequence state_seq;      ///< s, length n
  double rate = 0.0;       ///< R in bits per symbol

  std::size_t n() const { return state_seq.size(); }
  std::size_t state_count() const { return q_us.input_size(); }
  std::size_t u_size() const { return q_us.output_size(); }
  std::size_t v_size() const { return q_vus.front().output_size(); }

  void validate() const {
    if (q_vus.size() != q_us.input_size()) {
      throw std::invalid_argument("SoftCoverProblem: need one Q_{V|U,S=s} per state");
    }
    for (const auto& c : q_vus) {
      if (c.input_size() != q_us.output_size() || c.output_size() != q_vus.front().output_size()) {
        throw std::invalid_argument("SoftCoverProblem: Q_{V|U,S} shapes are inconsistent");
      }
    }
    if (state_seq.empty()) throw std::invalid_argument("SoftCoverProblem: empty state sequence");
    for (auto s : state_seq) {
      if (s >= state_count()) throw std::invalid_argument("SoftCoverProblem: state out of range");
    }
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("SoftCoverProblem: rate must be finite and >= 0");
    }
  }

  /// Q_{V|S=s} = sum_u Q_{U|S}(u|s) Q_{V|U,S}(.|u,s).
  Pmf v_given_s(std::size_t s) const {
    std::vector<double> p(v_size(), 0.0);
    for (std::size_t u = 0; u < u_size(); ++u) {
      for (std::size_t v = 0; v < v_size(); ++v) p[v] += q_us(s, u) * q_vus[s](u, v);
    }
    return Pmf::normalized(std::move(p));
  }

  /// Joint law of (U, V) given S = s.
  JointPmf uv_given_s(std::size_t s) const {
    std::vector<double> t(u_size() * v_size());
    for (std::size_t u = 0; u < u_size(); ++u) {
      for (std::size_t v = 0; v < v_size(); ++v) t[u * v_size() + v] = q_us(s, u) * q_vus[s](u, v);
    }
    return JointPmf({u_size(), v_size()}, Pmf::normalized(std::move(t)).vec());
  }
};

/// I(U;V|S) under nu_s Q_{U|S} Q_{V|U,S}, where nu_s is the type of the state sequence.
inline double conditional_mutual_info_under_type(const SoftCoverProblem& prob) {
  prob.validate();
  const Pmf nu = empirical_pmf(prob.state_seq, prob.state_count());
  double total = 0.0;
  for (std::size_t s = 0; s < nu.size(); ++s) {
    if (nu[s] > 0.0) total += nu[s] * mutual_info(prob.uv_given_s(s));
  }
  return total;
}

/// max over all states of d_eta(Q_{UV|S=s}, Q_{U|S=s} Q_{V|S=s}).
inline double max_state_renyi(const SoftCoverProblem& prob, double eta) {
  double d = 0.0;
  for (std::size_t s = 0; s < prob.state_count(); ++s) {
    d = std::max(d, divergence_from_product(prob.uv_given_s(s), {0}, {1}, eta));
  }
  return d;
}

struct ExponentReport {
  double delta;
  double gamma_delta;   ///< clamped at 0
  double c_delta;
  double eta_star;      ///< maximizing order; +inf for the limit; 1 when gamma_delta = 0
  double gamma_star;    ///< gamma at delta = 0
  double beta_eta_delta;     ///< (eta*-1)/(2eta*-1) (R - delta - max_s d_eta*)
  double epsilon_eta_delta;  ///< optimized typicality slack at eta*
  double alpha;         ///< max 1/Q_{V|S}(v|s) over the support
  double cond_mi;       ///< I(U;V|S) under the state type
};

namespace detail {

// Orders 1 + 2^{-10 + i/2}, i = 0..40.
inline constexpr int kEtaGridPoints = 41;

inline double eta_from_grid(double i) { return 1.0 + std::exp2(-10.0 + 0.5 * i); }

inline double exponent_objective(const SoftCoverProblem& prob, double r_minus_delta, double eta) {
  const double d = max_state_renyi(prob, eta);
  if (std::isinf(eta)) return 0.5 * (r_minus_delta - d);
  return (eta - 1.0) / (2.0 * eta - 1.0) * (r_minus_delta - d);
}

struct EtaSearch {
  double value;
  double eta;
};

// Maximizes the exponent objective over eta > 1: grid, golden refinement in
// log2(eta - 1) around the best grid point, then the eta -> infinity limit.
inline EtaSearch search_eta(const SoftCoverProblem& prob, double r_minus_delta) {
  double best = -kInfinity;
  int best_i = 0;
  for (int i = 0; i < kEtaGridPoints; ++i) {
    const double v = exponent_objective(prob, r_minus_delta, eta_from_grid(i));
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  EtaSearch out{best, eta_from_grid(best_i)};
  const double lo = std::max(0, best_i - 1);
  const double hi = std::min(kEtaGridPoints - 1, best_i + 1);
  auto [t, v] = golden_section_max(
      [&](double i) { return exponent_objective(prob, r_minus_delta, eta_from_grid(i)); }, lo, hi,
      1e-9);
  if (v > out.value) out = {v, eta_from_grid(t)};
  const double limit = exponent_objective(prob, r_minus_delta, kInfinity);
  if (limit > out.value) out = {limit, kInfinity};
  return out;
}

inline double support_alpha(const SoftCoverProblem& prob) {
  double alpha = 1.0;
  for (std::size_t s = 0; s < prob.state_count(); ++s) {
    const Pmf q = prob.v_given_s(s);
    for (std::size_t v = 0; v < q.size(); ++v) {
      if (q[v] > 0.0) alpha = std::max(alpha, 1.0 / q[v]);
    }
  }
  return alpha;
}

}  // namespace detail

/// Soft-covering exponent report; delta defaults to (R - I(U;V|S)) / 2.
///
/// delta must be positive. delta >= R - I(U;V|S) is allowed and yields
/// gamma_delta = 0 with eta_star = 1.
inline ExponentReport soft_cover_exponent(const SoftCoverProblem& prob,
                                          std::optional<double> delta = std::nullopt) {
  prob.validate();
  const double i_cond = conditional_mutual_info_under_type(prob);
  const double slack = prob.rate - i_cond;
  if (!delta) {
    if (!(slack > 0.0)) {
      throw std::invalid_argument("soft_cover_exponent: rate must exceed I(U;V|S) for the default delta");
    }
    delta = slack / 2.0;
  }
  const double d = *delta;
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("soft_cover_exponent: delta must be finite and > 0");
  }
  const double alpha = detail::support_alpha(prob);
  const auto star = detail::search_eta(prob, prob.rate);

  ExponentReport rep{};
  rep.delta = d;
  rep.alpha = alpha;
  rep.cond_mi = i_cond;
  rep.gamma_star = std::max(0.0, star.value);
  if (d >= slack) {
    rep.gamma_delta = 0.0;
    rep.eta_star = 1.0;
    rep.beta_eta_delta = 0.0;
    rep.epsilon_eta_delta = 0.0;
  } else {
    const auto best = detail::search_eta(prob, prob.rate - d);
    rep.gamma_delta = std::max(0.0, best.value);
    rep.eta_star = best.eta;
    rep.beta_eta_delta = best.value;
    const double dm = max_state_renyi(prob, best.eta);
    rep.epsilon_eta_delta =
        std::isinf(best.eta)
            ? dm - i_cond
            : (0.5 * (prob.rate - d) + (best.eta - 1.0) * dm) / (0.5 + best.eta - 1.0) - i_cond;
  }
  rep.c_delta = 3.0 * std::numbers::log2e + 2.0 * rep.gamma_delta + 2.0 * std::log2(alpha);
  return rep;
}

/// Concentration bound (1 + |V|^n) exp(-2^{n delta} / 3).
inline double soft_cover_failure_bound(std::size_t v_size, std::size_t n, double delta) {
  return (1.0 + std::pow(static_cast<double>(v_size), static_cast<double>(n))) *
         std::exp(-std::exp2(static_cast<double>(n) * delta) / 3.0);
}

struct RandomCodebook {
  std::vector<Sequence> words;
  std::uint64_t seed;
};

/// floor(2^{nR}) as an integer; throws SizeLimitError above the enumeration limit.
inline std::uint64_t codebook_size(std::size_t n, double rate) {
  const double log_size = static_cast<double>(n) * rate;
  if (log_size > std::log2(static_cast<double>(kEnumerationLimit))) {
    throw SizeLimitError("codebook of 2^" + std::to_string(log_size) + " words exceeds the limit");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(std::exp2(log_size))));
}

inline RandomCodebook draw_codebook(const SoftCoverProblem& prob, std::uint64_t seed) {
  prob.validate();
  const std::uint64_t size = codebook_size(prob.n(), prob.rate);
  Rng rng = make_rng(seed);
  RandomCodebook book{std::vector<Sequence>(size, Sequence(prob.n())), seed};
  for (auto& w : book.words) {
    for (std::size_t t = 0; t < prob.n(); ++t) {
      w[t] = sample_categorical(rng, prob.q_us.row(prob.state_seq[t]));
    }
  }
  return book;
}

namespace detail {

inline double log_add(double a, double b) {
  if (a == -kInfinity) return b;
  if (b == -kInfinity) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Natural-log mass sum_{w in [lo, hi)} prod_{t >= depth} Q(v_t | u_{w,t}, s_t)
// for every suffix v_{depth..n-1}, with the words sorted lexicographically.
inline std::vector<double> induced_log_mass(const SoftCoverProblem& prob,
                                            const std::vector<const Sequence*>& words,
                                            std::size_t lo, std::size_t hi, std::size_t depth,
                                            const std::vector<std::vector<double>>& log_q) {
  const std::size_t n = prob.n();
  if (depth == n) return {std::log(static_cast<double>(hi - lo))};
  const std::size_t nv = prob.v_size();
  std::size_t tail = 1;
  for (std::size_t t = depth + 1; t < n; ++t) tail *= nv;
  std::vector<double> out(nv * tail, -kInfinity);
  const std::size_t s = prob.state_seq[depth];
  std::size_t start = lo;
  while (start < hi) {
    const std::size_t a = (*words[start])[depth];
    std::size_t end = start;
    while (end < hi && (*words[end])[depth] == a) ++end;
    const auto sub = induced_log_mass(prob, words, start, end, depth + 1, log_q);
    for (std::size_t v = 0; v < nv; ++v) {
      const double lq = log_q[s][a * nv + v];
      if (lq == -kInfinity) continue;
      for (std::size_t r = 0; r < tail; ++r) {
        out[v * tail + r] = log_add(out[v * tail + r], lq + sub[r]);
      }
    }
    start = end;
  }
  return out;
}

}  // namespace detail

/// D(P_{V|B} || Q^n_{V|S=s}) in bits for the codebook's induced output law.
///
/// Enumerates all |V|^n outputs. The mixture is built over a prefix tree of
/// the sorted codewords and accumulated in log space; the final sum uses
/// compensated summation.
inline double exact_induced_divergence(const SoftCoverProblem& prob, const RandomCodebook& book) {
  prob.validate();
  const std::size_t n = prob.n();
  const std::size_t nv = prob.v_size();
  if (book.words.empty()) throw std::invalid_argument("exact_induced_divergence: empty codebook");
  const double outputs = std::pow(static_cast<double>(nv), static_cast<double>(n));
  if (outputs > static_cast<double>(kEnumerationLimit)) {
    throw SizeLimitError("exact_induced_divergence: |V|^n exceeds the enumeration limit");
  }
  for (const auto& w : book.words) {
    if (w.size() != n) throw std::invalid_argument("exact_induced_divergence: word length != n");
    for (auto u : w) {
      if (u >= prob.u_size()) throw std::invalid_argument("exact_induced_divergence: bad symbol");
    }
  }
  std::vector<std::vector<double>> log_q(prob.state_count());
  std::vector<std::vector<double>> log_ref(prob.state_count());
  for (std::size_t s = 0; s < prob.state_count(); ++s) {
    for (double p : prob.q_vus[s].flat()) log_q[s].push_back(p > 0.0 ? std::log(p) : -kInfinity);
    const Pmf ref = prob.v_given_s(s);
    for (double p : ref.vec()) log_ref[s].push_back(p > 0.0 ? std::log(p) : -kInfinity);
  }
  std::vector<const Sequence*> sorted;
  sorted.reserve(book.words.size());
  for (const auto& w : book.words) sorted.push_back(&w);
  std::sort(sorted.begin(), sorted.end(), [](const Sequence* a, const Sequence* b) { return *a < *b; });
  const auto mass = detail::induced_log_mass(prob, sorted, 0, sorted.size(), 0, log_q);
  const double log_size = std::log(static_cast<double>(book.words.size()));

  CompensatedSum sum;
  std::vector<std::size_t> v(n, 0);
  for (std::size_t idx = 0; idx < mass.size(); ++idx) {
    const double lp = mass[idx] - log_size;
    if (lp != -kInfinity) {
      double lr = 0.0;
      for (std::size_t t = 0; t < n; ++t) lr += log_ref[prob.state_seq[t]][v[t]];
      if (lr == -kInfinity) return kInfinity;
      sum.add(std::exp(lp) * (lp - lr));
    }
    // Advance v in the same order as `mass` (first position most significant).
    for (std::size_t t = n; t-- > 0;) {
      if (++v[t] < nv) break;
      v[t] = 0;
    }
  }
  return std::max(0.0, nats_to_bits(sum.value()));
}

struct SoftCoverTrials {
  std::vector<double> divergences;
  double threshold;         ///< c_delta n 2^{-n gamma_delta}
  double failure_fraction;  ///< share of trials with divergence > threshold
  double lemma_bound;       ///< (1 + |V|^n) exp(-2^{n delta} / 3), may exceed 1
  ExponentReport report;
};

/// Independent random codebooks; trial t uses seed derive_seed(seed, t).
inline SoftCoverTrials soft_cover_trials(const SoftCoverProblem& prob, std::size_t trials,
                                         std::uint64_t seed,
                                         std::optional<double> delta = std::nullopt) {
  if (trials == 0) throw std::invalid_argument("soft_cover_trials: trials must be >= 1");
  const ExponentReport rep = soft_cover_exponent(prob, delta);
  const double n = static_cast<double>(prob.n());
  SoftCoverTrials out{{}, rep.c_delta * n * std::exp2(-n * rep.gamma_delta), 0.0,
                      soft_cover_failure_bound(prob.v_size(), prob.n(), rep.delta), rep};
  std::size_t failures = 0;
  out.divergences.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const double d = exact_induced_divergence(prob, draw_codebook(prob, derive_seed(seed, t)));
    out.divergences.push_back(d);
    failures += d > out.threshold;
  }
  out.failure_fraction = static_cast<double>(failures) / static_cast<double>(trials);
  return out;
}

/// exp(-(L mu / 3B) (c/mu - 1)^2), valid for c/mu in [1, 2].
inline double chernoff_bound(std::size_t l, double mu, double b, double c) {
  if (l == 0) throw std::invalid_argument("chernoff_bound: L must be >= 1");
  if (!(mu > 0.0) || !(b > 0.0)) throw std::invalid_argument("chernoff_bound: mu and B must be > 0");
  const double ratio = c / mu;
  if (!(ratio >= 1.0 && ratio <= 2.0)) {
    throw std::invalid_argument("chernoff_bound: c/mu must lie in [1, 2]");
  }
  const double dev = ratio - 1.0;
  return std::exp(-(static_cast<double>(l) * mu / (3.0 * b)) * dev * dev);
}

}  // namespace avwtc
