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

// Random wiretap codes at desk scale: i.i.d. codebooks indexed by (message m,
// local randomness w), the strict-maximum decoder on the likelihood-ratio
// metric d(x, y) = prod_i W(y_i|x_i) / Q_Y(y_i), exact and Monte Carlo error
// probabilities, the ensemble error bound P(d(X,Y) < |M||W|/eta) + eta, and
// semantic leakage max_{P_M} I(M; Z).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avwtc/errors.hpp"
#include "avwtc/info.hpp"
#include "avwtc/prob.hpp"
#include "avwtc/rng.hpp"

namespace avwtc {

/// Codewords x(m, w), stored at index m * w_count + w (0-based).
struct WiretapCodebook {
  std::size_t n = 0;
  std::size_t m_count = 0;
  std::size_t w_count = 0;
  std::vector<Sequence> words;
  std::uint64_t seed = 0;

  const Sequence& word(std::size_t m, std::size_t w) const { return words.at(m * w_count + w); }
  std::size_t size() const { return words.size(); }
};

inline WiretapCodebook build_codebook(const Pmf& q_x, std::size_t n, std::size_t m_count,
                                      std::size_t w_count, std::uint64_t seed) {
  if (n == 0 || m_count == 0 || w_count == 0) {
    throw std::invalid_argument("build_codebook: n, M and W must be >= 1");
  }
  WiretapCodebook book{n, m_count, w_count, {}, seed};
  book.words.reserve(m_count * w_count);
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < m_count * w_count; ++i) {
    Sequence x(n);
    for (auto& v : x) v = sample_categorical(rng, q_x.probs());
    book.words.push_back(std::move(x));
  }
  return book;
}

/// Decoder output: a codeword index pair, or an erasure.
struct DecodeResult {
  bool erasure = true;
  std::size_t m = 0;
  std::size_t w = 0;

  static DecodeResult erased() { return {}; }
  static DecodeResult message(std::size_t m, std::size_t w) { return {false, m, w}; }
  bool operator==(const DecodeResult&) const = default;
};

/// Relative tolerance under which two log-metrics count as tied.
inline constexpr double kMetricTieTolerance = 1e-12;

inline bool log_metrics_tied(double a, double b) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= kMetricTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

/// The likelihood-ratio metric for channel w_tilde and input law q_x.
class MetricDecoder {
 public:
  MetricDecoder(Dmc w_tilde, Pmf q_x) : w_(std::move(w_tilde)), q_x_(std::move(q_x)) {
    if (q_x_.size() != w_.input_size()) {
      throw std::invalid_argument("MetricDecoder: Q_X size does not match the channel");
    }
    const Pmf q_y = w_.output_pmf(q_x_);
    y_zero_.resize(w_.output_size());
    log_ratio_.resize(w_.input_size() * w_.output_size());
    for (std::size_t y = 0; y < w_.output_size(); ++y) y_zero_[y] = q_y[y] <= 0.0;
    for (std::size_t x = 0; x < w_.input_size(); ++x) {
      for (std::size_t y = 0; y < w_.output_size(); ++y) {
        const double p = w_(x, y);
        log_ratio_[x * w_.output_size() + y] =
            y_zero_[y] ? 0.0 : (p > 0.0 ? std::log(p) - std::log(q_y[y]) : -kInfinity);
      }
    }
  }

  const Dmc& channel() const { return w_; }
  const Pmf& input_pmf() const { return q_x_; }

  /// ln d(x, y). Equal joint types give bitwise-equal results because the
  /// sum runs over (x, y) symbol pairs in a fixed order.
  double log_metric(std::span<const std::size_t> x, std::span<const std::size_t> y) const {
    if (x.size() != y.size()) throw std::invalid_argument("log_metric: length mismatch");
    const std::size_t ny = w_.output_size();
    for (auto b : y) {
      if (b >= ny) throw std::invalid_argument("log_metric: output symbol out of range");
      if (y_zero_[b]) return 0.0;  // Q_Y^n(y) = 0: d = 1 by convention.
    }
    std::vector<std::size_t> pairs(w_.input_size() * ny, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] >= w_.input_size()) throw std::invalid_argument("log_metric: input symbol out of range");
      ++pairs[x[i] * ny + y[i]];
    }
    double total = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (pairs[k] == 0) continue;
      if (log_ratio_[k] == -kInfinity) return -kInfinity;
      total += static_cast<double>(pairs[k]) * log_ratio_[k];
    }
    return total;
  }

  double metric(std::span<const std::size_t> x, std::span<const std::size_t> y) const {
    return std::exp(log_metric(x, y));
  }

  /// The unique codeword whose metric strictly exceeds all others, else erasure.
  DecodeResult decode(const WiretapCodebook& book, std::span<const std::size_t> y) const {
    if (y.size() != book.n) throw std::invalid_argument("decode: output length != n");
    std::size_t best = 0;
    double best_val = -kInfinity;
    bool tied = false;
    for (std::size_t i = 0; i < book.size(); ++i) {
      const double v = log_metric(book.words[i], y);
      if (i == 0) {
        best_val = v;
        continue;
      }
      if (log_metrics_tied(v, best_val)) {
        tied = true;
      } else if (v > best_val) {
        best = i;
        best_val = v;
        tied = false;
      }
    }
    if (tied) return DecodeResult::erased();
    return DecodeResult::message(best / book.w_count, best % book.w_count);
  }

 private:
  Dmc w_;
  Pmf q_x_;
  std::vector<bool> y_zero_;
  std::vector<double> log_ratio_;
};

inline double decoding_metric(std::span<const std::size_t> x, std::span<const std::size_t> y,
                              const Dmc& w_tilde, const Pmf& q_x) {
  return MetricDecoder(w_tilde, q_x).metric(x, y);
}

inline DecodeResult decode(const WiretapCodebook& book, std::span<const std::size_t> y,
                           const Dmc& w_tilde, const Pmf& q_x) {
  return MetricDecoder(w_tilde, q_x).decode(book, y);
}

/// Any map from an output sequence to a decision.
using DecodeFn = std::function<DecodeResult(std::span<const std::size_t>)>;

enum class EvalMode { kExact, kMonteCarlo };

struct McOptions {
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_state_sequence(const Avwtc& ch, std::span<const std::size_t> s, std::size_t n) {
  if (s.size() != n) throw std::invalid_argument("state sequence length != n");
  for (auto v : s) {
    if (v >= ch.state_count()) throw std::invalid_argument("state sequence symbol out of range");
  }
}

inline void require_enumerable(std::size_t alphabet, std::size_t n, double limit, const char* who) {
  if (std::pow(static_cast<double>(alphabet), static_cast<double>(n)) > limit) {
    throw SizeLimitError(std::string(who) + ": exact enumeration exceeds the size limit");
  }
}

/// Calls f(y, prob) for every y with prod_i W_{s_i}(y_i|x_i) > 0.
template <typename F>
void for_each_output(const std::vector<Dmc>& family, std::span<const std::size_t> s,
                     std::span<const std::size_t> x, std::size_t out_size, F&& f) {
  const std::size_t n = x.size();
  Sequence y(n, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n && p > 0.0; ++i) p *= family[s[i]](x[i], y[i]);
    if (p > 0.0) f(static_cast<const Sequence&>(y), p);
    std::size_t i = 0;
    while (i < n && ++y[i] == out_size) y[i++] = 0;
    if (i == n) break;
  }
}

}  // namespace detail

/// Probability that message m is not recovered under state sequence s, with w
/// uniform over the codebook's local randomness. `decoder` may be any rule.
inline double error_prob(const WiretapCodebook& book, std::span<const std::size_t> s,
                         const Avwtc& ch, std::size_t m, const DecodeFn& decoder,
                         EvalMode mode = EvalMode::kExact, const McOptions& mc = {}) {
  if (m >= book.m_count) throw std::invalid_argument("error_prob: message out of range");
  detail::check_state_sequence(ch, s, book.n);
  const std::size_t ny = ch.main_output_size();
  if (mode == EvalMode::kExact) {
    detail::require_enumerable(ny, book.n, static_cast<double>(kEnumerationLimit), "error_prob");
    CompensatedSum err;
    for (std::size_t w = 0; w < book.w_count; ++w) {
      detail::for_each_output(ch.main(), s, book.word(m, w), ny,
                              [&](const Sequence& y, double p) {
                                const auto r = decoder(y);
                                if (r.erasure || r.m != m) err.add(p);
                              });
    }
    return std::clamp(err.value() / static_cast<double>(book.w_count), 0.0, 1.0);
  }
  if (mc.trials == 0) throw std::invalid_argument("error_prob: trials must be >= 1");
  std::size_t errors = 0;
  for (std::size_t t = 0; t < mc.trials; ++t) {
    Rng rng = make_rng(mc.seed, t);
    const std::size_t w = uniform_index(rng, book.w_count);
    Sequence y(book.n);
    const auto& x = book.word(m, w);
    for (std::size_t i = 0; i < book.n; ++i) y[i] = sample_categorical(rng, ch.main()[s[i]].row(x[i]));
    const auto r = decoder(y);
    errors += r.erasure || r.m != m;
  }
  return static_cast<double>(errors) / static_cast<double>(mc.trials);
}

inline double error_prob(const WiretapCodebook& book, std::span<const std::size_t> s,
                         const Avwtc& ch, std::size_t m, const MetricDecoder& dec,
                         EvalMode mode = EvalMode::kExact, const McOptions& mc = {}) {
  return error_prob(
      book, s, ch, m, [&](std::span<const std::size_t> y) { return dec.decode(book, y); }, mode, mc);
}

/// Exact probability that the pair (m, w) is not decoded as (m, w).
inline double pair_error_prob(const WiretapCodebook& book, std::span<const std::size_t> s,
                              const Avwtc& ch, std::size_t m, std::size_t w,
                              const MetricDecoder& dec) {
  if (m >= book.m_count || w >= book.w_count) {
    throw std::invalid_argument("pair_error_prob: index out of range");
  }
  detail::check_state_sequence(ch, s, book.n);
  const std::size_t ny = ch.main_output_size();
  detail::require_enumerable(ny, book.n, static_cast<double>(kEnumerationLimit), "pair_error_prob");
  const auto target = DecodeResult::message(m, w);
  CompensatedSum err;
  detail::for_each_output(ch.main(), s, book.word(m, w), ny, [&](const Sequence& y, double p) {
    if (!(dec.decode(book, y) == target)) err.add(p);
  });
  return std::clamp(err.value(), 0.0, 1.0);
}

struct Lemma4Bound {
  double probability;  ///< P(d(X, Y) < |M||W| / eta) under Q_X^n W_s^n
  double eta;
  double value() const { return probability + eta; }
};

/// The ensemble error bound P_{Q_X^n W_s^n}(d(X,Y) < |M||W|/eta) + eta.
///
/// Metrics within kMetricTieTolerance of the threshold count as equal to it,
/// hence not below it.
inline Lemma4Bound lemma4_bound(std::size_t m_count, std::size_t w_count, const MetricDecoder& dec,
                                const Avwtc& ch, std::span<const std::size_t> s, double eta,
                                EvalMode mode = EvalMode::kExact, const McOptions& mc = {}) {
  if (!(eta > 0.0)) throw std::invalid_argument("lemma4_bound: eta must be > 0");
  if (m_count == 0 || w_count == 0) throw std::invalid_argument("lemma4_bound: empty codebook");
  const std::size_t n = s.size();
  if (n == 0) throw std::invalid_argument("lemma4_bound: empty state sequence");
  detail::check_state_sequence(ch, s, n);
  const double log_threshold =
      std::log(static_cast<double>(m_count) * static_cast<double>(w_count) / eta);
  auto below = [&](double lm) {
    return lm < log_threshold && !log_metrics_tied(lm, log_threshold);
  };
  const Pmf& q_x = dec.input_pmf();
  const std::size_t nx = q_x.size();
  const std::size_t ny = ch.main_output_size();
  if (nx != ch.input_size()) throw std::invalid_argument("lemma4_bound: Q_X size mismatch");
  if (mode == EvalMode::kExact) {
    detail::require_enumerable(nx * ny, n, static_cast<double>(kEnumerationLimit), "lemma4_bound");
    CompensatedSum prob;
    Sequence x(n, 0);
    while (true) {
      double px = 1.0;
      for (auto a : x) px *= q_x[a];
      if (px > 0.0) {
        detail::for_each_output(ch.main(), s, x, ny, [&](const Sequence& y, double p) {
          if (below(dec.log_metric(x, y))) prob.add(px * p);
        });
      }
      std::size_t i = 0;
      while (i < n && ++x[i] == nx) x[i++] = 0;
      if (i == n) break;
    }
    return {std::clamp(prob.value(), 0.0, 1.0), eta};
  }
  if (mc.trials == 0) throw std::invalid_argument("lemma4_bound: trials must be >= 1");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < mc.trials; ++t) {
    Rng rng = make_rng(mc.seed, t);
    Sequence x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = sample_categorical(rng, q_x.probs());
      y[i] = sample_categorical(rng, ch.main()[s[i]].row(x[i]));
    }
    hits += below(dec.log_metric(x, y));
  }
  return {static_cast<double>(hits) / static_cast<double>(mc.trials), eta};
}

/// E_{Q_X^n} d(X, y), computed exactly by enumerating x.
inline double expected_metric(const MetricDecoder& dec, std::span<const std::size_t> y) {
  const std::size_t n = y.size();
  const Pmf& q_x = dec.input_pmf();
  detail::require_enumerable(q_x.size(), n, static_cast<double>(kEnumerationLimit),
                             "expected_metric");
  CompensatedSum total;
  Sequence x(n, 0);
  while (true) {
    double px = 1.0;
    for (auto a : x) px *= q_x[a];
    if (px > 0.0) total.add(px * dec.metric(x, y));
    std::size_t i = 0;
    while (i < n && ++x[i] == q_x.size()) x[i++] = 0;
    if (i == n) break;
  }
  return total.value();
}

/// W_u(y|x) = (1 - u |Y|) W(y|x) + u, which bounds every entry below by u.
inline Dmc smooth_channel(const Dmc& w, double upsilon) {
  const double ny = static_cast<double>(w.output_size());
  if (!(upsilon >= 0.0 && upsilon * ny <= 1.0)) {
    throw std::invalid_argument("smooth_channel: need 0 <= upsilon <= 1/|Y|");
  }
  std::vector<double> m(w.flat());
  for (double& v : m) v = (1.0 - upsilon * ny) * v + upsilon;
  return Dmc(w.input_size(), w.output_size(), std::move(m));
}

// ---------------------------------------------------------------------------
// Semantic leakage.

struct ChannelCapacity {
  double capacity;          ///< bits
  std::vector<double> input;
  std::size_t iterations;
};

/// I(M; Z) in bits for input law p over the rows of a row-stochastic matrix.
inline double input_mutual_info(const std::vector<std::vector<double>>& rows,
                                std::span<const double> p) {
  const std::size_t nz = rows.front().size();
  std::vector<double> q(nz, 0.0);
  for (std::size_t m = 0; m < rows.size(); ++m) {
    for (std::size_t z = 0; z < nz; ++z) q[z] += p[m] * rows[m][z];
  }
  double mi = 0.0;
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (p[m] <= 0.0) continue;
    for (std::size_t z = 0; z < nz; ++z) {
      if (rows[m][z] > 0.0) mi += p[m] * rows[m][z] * std::log2(rows[m][z] / q[z]);
    }
  }
  return std::max(0.0, mi);
}

/// Capacity of a finite channel by alternating maximization, stopped when the
/// upper bound max_m D(row_m || q) and the lower bound I(p) are within `tol`.
inline ChannelCapacity blahut_arimoto(const std::vector<std::vector<double>>& rows,
                                      double tol = 1e-9, std::size_t max_iters = 200000) {
  const std::size_t k = rows.size();
  const std::size_t nz = rows.front().size();
  std::vector<double> p(k, 1.0 / static_cast<double>(k));
  std::vector<double> dvec(k);
  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    std::vector<double> q(nz, 0.0);
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t z = 0; z < nz; ++z) q[z] += p[m] * rows[m][z];
    }
    double upper = -kInfinity;
    for (std::size_t m = 0; m < k; ++m) {
      double d = 0.0;
      for (std::size_t z = 0; z < nz; ++z) {
        if (rows[m][z] > 0.0) d += rows[m][z] * std::log2(rows[m][z] / q[z]);
      }
      dvec[m] = d;
      upper = std::max(upper, d);
    }
    double lower = 0.0;
    for (std::size_t m = 0; m < k; ++m) lower += p[m] * dvec[m];
    if (upper - lower < tol) break;
    double total = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      p[m] *= std::exp2(dvec[m] - upper);
      total += p[m];
    }
    for (auto& v : p) v /= total;
  }
  return {input_mutual_info(rows, p), p, it};
}

/// Rows P(z | m) = (1/|W|) sum_w V_s^n(z | x(m, w)), z enumerated with the
/// first position most significant.
inline std::vector<std::vector<double>> induced_eaves_channel(const WiretapCodebook& book,
                                                              std::span<const std::size_t> s,
                                                              const Avwtc& ch) {
  detail::check_state_sequence(ch, s, book.n);
  const std::size_t nz = ch.eaves_output_size();
  detail::require_enumerable(nz, book.n, 1e6, "semantic_leakage");
  std::size_t outputs = 1;
  for (std::size_t i = 0; i < book.n; ++i) outputs *= nz;
  std::vector<std::vector<double>> rows(book.m_count, std::vector<double>(outputs, 0.0));
  for (std::size_t m = 0; m < book.m_count; ++m) {
    for (std::size_t w = 0; w < book.w_count; ++w) {
      detail::for_each_output(ch.eaves(), s, book.word(m, w), nz, [&](const Sequence& z, double p) {
        std::size_t idx = 0;
        for (auto v : z) idx = idx * nz + v;
        rows[m][idx] += p / static_cast<double>(book.w_count);
      });
    }
  }
  return rows;
}

/// max over message laws of I(M; Z_s), the capacity of the induced channel
/// m -> z. Never below the uniform-message value.
inline double semantic_leakage(const WiretapCodebook& book, std::span<const std::size_t> s,
                               const Avwtc& ch) {
  if (book.m_count == 1) return 0.0;
  const auto rows = induced_eaves_channel(book, s, ch);
  const auto cap = blahut_arimoto(rows);
  const std::vector<double> uniform(book.m_count, 1.0 / static_cast<double>(book.m_count));
  return std::max(cap.capacity, input_mutual_info(rows, uniform));
}

}  // namespace avwtc
