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

// Finite-alphabet probability primitives: PMFs, channels, empirical types,
// type classes, letter-typical sets, i.i.d. sampling and channel averaging.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avwtc/errors.hpp"
#include "avwtc/rng.hpp"

namespace avwtc {

/// Absolute tolerance on the sum of a PMF.
inline constexpr double kPmfTolerance = 1e-12;
/// Tolerance for n * t(a) to count as an integer.
inline constexpr double kTypeTolerance = 1e-9;
/// Upper limit on the number of objects any exact enumeration may visit.
inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// A probability vector over the alphabet {0, ..., size()-1}.
///
/// Construction validates non-negativity and that the entries sum to one
/// within kPmfTolerance. Inputs are never renormalized silently; use
/// Pmf::normalized() to request it.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("Pmf: empty alphabet");
    double total = 0.0;
    for (double v : p_) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("Pmf: entries must be finite and >= 0");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kPmfTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "Pmf: entries sum to " << total << ", not 1";
      throw std::invalid_argument(os.str());
    }
  }

  static Pmf normalized(std::vector<double> weights) {
    double total = 0.0;
    for (double v : weights) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("Pmf::normalized: bad weight");
      }
      total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("Pmf::normalized: zero mass");
    for (double& v : weights) v /= total;
    return Pmf(std::move(weights));
  }

  static Pmf uniform(std::size_t k) {
    if (k == 0) throw std::invalid_argument("Pmf::uniform: empty alphabet");
    return Pmf(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static Pmf point_mass(std::size_t k, std::size_t a) {
    if (a >= k) throw std::invalid_argument("Pmf::point_mass: symbol out of range");
    std::vector<double> p(k, 0.0);
    p[a] = 1.0;
    return Pmf(std::move(p));
  }

  /// Binary PMF (1-p, p).
  static Pmf bernoulli(double p) { return Pmf({1.0 - p, p}); }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t a) const { return p_[a]; }
  std::span<const double> probs() const { return p_; }
  const std::vector<double>& vec() const { return p_; }

  bool operator==(const Pmf&) const = default;

 private:
  std::vector<double> p_;
};

/// A discrete memoryless channel: row-stochastic matrix, rows indexed by the
/// input symbol.
class Dmc {
 public:
  Dmc(std::size_t input_size, std::size_t output_size, std::vector<double> rows)
      : in_(input_size), out_(output_size), m_(std::move(rows)) {
    if (in_ == 0 || out_ == 0) throw std::invalid_argument("Dmc: empty alphabet");
    if (m_.size() != in_ * out_) throw std::invalid_argument("Dmc: shape mismatch");
    for (std::size_t x = 0; x < in_; ++x) {
      try {
        Pmf check(std::vector<double>(m_.begin() + x * out_,
                                      m_.begin() + (x + 1) * out_));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("Dmc: row " + std::to_string(x) + ": " +
                                    e.what());
      }
    }
  }

  explicit Dmc(const std::vector<std::vector<double>>& rows)
      : Dmc(rows.size(), rows.empty() ? 0 : rows.front().size(), flatten(rows)) {}

  static Dmc identity(std::size_t k) {
    std::vector<double> m(k * k, 0.0);
    for (std::size_t x = 0; x < k; ++x) m[x * k + x] = 1.0;
    return Dmc(k, k, std::move(m));
  }

  static Dmc bsc(double crossover) {
    if (!(crossover >= 0.0 && crossover <= 1.0)) {
      throw std::invalid_argument("Dmc::bsc: crossover outside [0,1]");
    }
    return Dmc(2, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
  }

  /// Binary erasure channel; output symbol 2 is the erasure.
  static Dmc bec(double erasure) {
    if (!(erasure >= 0.0 && erasure <= 1.0)) {
      throw std::invalid_argument("Dmc::bec: erasure outside [0,1]");
    }
    return Dmc(2, 3, {1.0 - erasure, 0.0, erasure, 0.0, 1.0 - erasure, erasure});
  }

  /// Every input produces the same output law.
  static Dmc constant(std::size_t input_size, const Pmf& output) {
    std::vector<double> m;
    m.reserve(input_size * output.size());
    for (std::size_t x = 0; x < input_size; ++x) {
      m.insert(m.end(), output.vec().begin(), output.vec().end());
    }
    return Dmc(input_size, output.size(), std::move(m));
  }

  std::size_t input_size() const { return in_; }
  std::size_t output_size() const { return out_; }
  double operator()(std::size_t x, std::size_t y) const { return m_[x * out_ + y]; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(m_).subspan(x * out_, out_);
  }
  const std::vector<double>& flat() const { return m_; }

  /// Output law sum_x p(x) W(.|x).
  Pmf output_pmf(const Pmf& input) const {
    if (input.size() != in_) throw std::invalid_argument("Dmc::output_pmf: shape mismatch");
    std::vector<double> q(out_, 0.0);
    for (std::size_t x = 0; x < in_; ++x) {
      for (std::size_t y = 0; y < out_; ++y) q[y] += input[x] * (*this)(x, y);
    }
    return Pmf::normalized(std::move(q));
  }

  bool operator==(const Dmc&) const = default;

 private:
  static std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> m;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) {
        throw std::invalid_argument("Dmc: ragged matrix");
      }
      m.insert(m.end(), r.begin(), r.end());
    }
    return m;
  }

  std::size_t in_;
  std::size_t out_;
  std::vector<double> m_;
};

/// Arbitrarily varying wiretap channel: one main channel W_s and one
/// eavesdropper channel V_s per state s, all sharing the input alphabet.
class Avwtc {
 public:
  Avwtc(std::vector<Dmc> main, std::vector<Dmc> eaves)
      : main_(std::move(main)), eaves_(std::move(eaves)) {
    if (main_.empty()) throw std::invalid_argument("Avwtc: need at least one state");
    if (main_.size() != eaves_.size()) {
      throw std::invalid_argument("Avwtc: main and eavesdropper families differ in size");
    }
    const std::size_t x = main_.front().input_size();
    const std::size_t y = main_.front().output_size();
    const std::size_t z = eaves_.front().output_size();
    for (std::size_t s = 0; s < main_.size(); ++s) {
      if (main_[s].input_size() != x || eaves_[s].input_size() != x) {
        throw std::invalid_argument("Avwtc: channel input sizes differ (state " +
                                    std::to_string(s) + ")");
      }
      if (main_[s].output_size() != y || eaves_[s].output_size() != z) {
        throw std::invalid_argument("Avwtc: channel output sizes differ (state " +
                                    std::to_string(s) + ")");
      }
    }
  }

  std::size_t input_size() const { return main_.front().input_size(); }
  std::size_t state_count() const { return main_.size(); }
  std::size_t main_output_size() const { return main_.front().output_size(); }
  std::size_t eaves_output_size() const { return eaves_.front().output_size(); }
  const std::vector<Dmc>& main() const { return main_; }
  const std::vector<Dmc>& eaves() const { return eaves_; }

 private:
  std::vector<Dmc> main_;
  std::vector<Dmc> eaves_;
};

/// A finite sequence of alphabet indices.
using Sequence = std::vector<std::size_t>;

struct TypicalityParams {
  double epsilon = 0.0;
};

enum class ProbMode { kExact, kBound };

// ---------------------------------------------------------------------------
// Counting helpers.

inline std::vector<std::size_t> symbol_counts(std::span<const std::size_t> seq,
                                              std::size_t alphabet_size) {
  std::vector<std::size_t> counts(alphabet_size, 0);
  for (std::size_t a : seq) {
    if (a >= alphabet_size) {
      throw std::invalid_argument("symbol " + std::to_string(a) +
                                  " outside alphabet of size " +
                                  std::to_string(alphabet_size));
    }
    ++counts[a];
  }
  return counts;
}

inline std::size_t hamming_distance(std::span<const std::size_t> a,
                                    std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

/// Binomial coefficient; throws SizeLimitError when it does not fit 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw SizeLimitError("binomial(" + std::to_string(n) + ", " +
                           std::to_string(k) + ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(r);
}

/// n! / prod_a counts[a]!  with n = sum(counts); throws on 64-bit overflow.
inline std::uint64_t multinomial(std::span<const std::size_t> counts) {
  std::uint64_t total = 0;
  unsigned __int128 r = 1;
  for (std::size_t c : counts) {
    total += c;
    const std::uint64_t b = binomial(total, c);
    r *= b;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw SizeLimitError("multinomial coefficient overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(r);
}

inline double log_multinomial(std::span<const std::size_t> counts) {
  double total = 0.0;
  double r = 0.0;
  for (std::size_t c : counts) {
    total += static_cast<double>(c);
    r -= std::lgamma(static_cast<double>(c) + 1.0);
  }
  return r + std::lgamma(total + 1.0);
}

// ---------------------------------------------------------------------------
// Types.

inline Pmf empirical_pmf(std::span<const std::size_t> seq, std::size_t alphabet_size) {
  if (seq.empty()) throw std::invalid_argument("empirical_pmf: empty sequence");
  if (alphabet_size == 0) throw std::invalid_argument("empirical_pmf: empty alphabet");
  const auto counts = symbol_counts(seq, alphabet_size);
  const double n = static_cast<double>(seq.size());
  std::vector<double> p(alphabet_size);
  for (std::size_t a = 0; a < alphabet_size; ++a) p[a] = static_cast<double>(counts[a]) / n;
  return Pmf(std::move(p));
}

/// The count vector n * t, or InvalidTypeError if t is not a type for n.
inline std::vector<std::size_t> type_counts(const Pmf& t, std::size_t n) {
  if (n == 0) throw std::invalid_argument("type_counts: n must be >= 1");
  std::vector<std::size_t> counts(t.size());
  std::size_t total = 0;
  for (std::size_t a = 0; a < t.size(); ++a) {
    const double scaled = t[a] * static_cast<double>(n);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > kTypeTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "not a type for n=" << n << ": n*t(" << a << ") = " << scaled;
      throw InvalidTypeError(os.str());
    }
    counts[a] = static_cast<std::size_t>(rounded);
    total += counts[a];
  }
  if (total != n) throw InvalidTypeError("type counts do not sum to n");
  return counts;
}

/// Number of types of length-n sequences over k symbols: binom(n+k-1, k-1).
inline std::uint64_t type_count(std::size_t n, std::size_t k) {
  if (n == 0 || k == 0) throw std::invalid_argument("type_count: n, k must be >= 1");
  return binomial(n + k - 1, k - 1);
}

/// All count vectors (c_0..c_{k-1}) with sum n, in lexicographic order.
inline std::vector<std::vector<std::size_t>> enumerate_compositions(
    std::size_t n, std::size_t k, std::uint64_t limit = kEnumerationLimit) {
  const std::uint64_t count = type_count(n, k);
  if (count > limit) {
    throw SizeLimitError("enumerate_types: " + std::to_string(count) +
                         " types exceed the limit of " + std::to_string(limit));
  }
  std::vector<std::vector<std::size_t>> out;
  out.reserve(count);
  std::vector<std::size_t> c(k, 0);
  c[k - 1] = n;
  // Odometer over compositions: first k-1 parts free, last part takes the rest.
  while (true) {
    out.push_back(c);
    if (k == 1) break;
    std::size_t used = n - c[k - 1];
    std::size_t i = k - 1;
    // Find the rightmost free part that can still grow.
    bool advanced = false;
    while (i-- > 0) {
      if (used < n) {
        ++c[i];
        ++used;
        c[k - 1] = n - used;
        advanced = true;
        break;
      }
      used -= c[i];
      c[i] = 0;
      c[k - 1] = n - used;
    }
    if (!advanced) break;
  }
  return out;
}

/// All types P_n(X) for alphabet size k.
inline std::vector<Pmf> enumerate_types(std::size_t n, std::size_t k) {
  const auto comps = enumerate_compositions(n, k);
  std::vector<Pmf> types;
  types.reserve(comps.size());
  const double dn = static_cast<double>(n);
  for (const auto& c : comps) {
    std::vector<double> p(k);
    for (std::size_t a = 0; a < k; ++a) p[a] = static_cast<double>(c[a]) / dn;
    types.emplace_back(std::move(p));
  }
  return types;
}

/// |T^n_t|, the number of sequences whose type is exactly t.
inline std::uint64_t type_class_size(const Pmf& t, std::size_t n) {
  return multinomial(type_counts(t, n));
}

// ---------------------------------------------------------------------------
// Letter typicality with the epsilon / |X| normalization.

namespace detail {

// Slack absorbs rounding in c/n - p at the boundary of the typical set.
inline constexpr double kTypicalSlack = 1e-12;

inline bool counts_typical(std::span<const std::size_t> counts, std::size_t n,
                           const Pmf& p, double epsilon) {
  const double k = static_cast<double>(p.size());
  const double dn = static_cast<double>(n);
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double nu = static_cast<double>(counts[a]) / dn;
    if (p[a] > 0.0) {
      if (std::abs(nu - p[a]) > epsilon / k + kTypicalSlack) return false;
    } else if (counts[a] != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

inline bool is_typical(std::span<const std::size_t> seq, const Pmf& p,
                       const TypicalityParams& params) {
  if (params.epsilon < 0.0) throw std::invalid_argument("is_typical: epsilon < 0");
  if (seq.empty()) throw std::invalid_argument("is_typical: empty sequence");
  const auto counts = symbol_counts(seq, p.size());
  return detail::counts_typical(counts, seq.size(), p, params.epsilon);
}

/// Probability that an i.i.d. P^n sequence falls outside the typical set.
///
/// kBound returns 2|X| exp(-2 n eps^2 / |X|^2). kExact sums the probability of
/// every atypical type class, class_size * prod p^count, so its cost scales
/// with the number of types rather than |X|^n.
inline double atypical_prob(const Pmf& p, std::size_t n, const TypicalityParams& params,
                            ProbMode mode) {
  if (n == 0) throw std::invalid_argument("atypical_prob: n must be >= 1");
  if (params.epsilon < 0.0) throw std::invalid_argument("atypical_prob: epsilon < 0");
  const double k = static_cast<double>(p.size());
  if (mode == ProbMode::kBound) {
    return 2.0 * k *
           std::exp(-2.0 * static_cast<double>(n) * params.epsilon * params.epsilon / (k * k));
  }
  CompensatedSum mass;
  for (const auto& c : enumerate_compositions(n, p.size())) {
    if (detail::counts_typical(c, n, p, params.epsilon)) continue;
    double log_prob = log_multinomial(c);
    bool possible = true;
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (c[a] == 0) continue;
      if (p[a] <= 0.0) {
        possible = false;
        break;
      }
      log_prob += static_cast<double>(c[a]) * std::log(p[a]);
    }
    if (possible) mass.add(std::exp(log_prob));
  }
  return std::clamp(mass.value(), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Sampling.

inline Sequence sample_iid(const Pmf& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_iid: n must be >= 1");
  Rng rng = make_rng(seed);
  Sequence seq(n);
  for (auto& s : seq) s = sample_categorical(rng, p.probs());
  return seq;
}

/// Output of the memoryless channel W^n on input x, drawn with `rng`.
inline Sequence sample_channel(const Dmc& w, std::span<const std::size_t> x, Rng& rng) {
  Sequence y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sample_categorical(rng, w.row(x[i]));
  return y;
}

/// Dirichlet(1, ..., 1) draw, i.e. uniform on the simplex.
inline Pmf random_pmf(std::size_t k, Rng& rng) {
  std::vector<double> w(k);
  for (auto& v : w) v = sample_exponential(rng);
  return Pmf::normalized(std::move(w));
}

inline Dmc random_dmc(std::size_t in, std::size_t out, Rng& rng) {
  std::vector<double> m;
  m.reserve(in * out);
  for (std::size_t x = 0; x < in; ++x) {
    const Pmf row = random_pmf(out, rng);
    m.insert(m.end(), row.vec().begin(), row.vec().end());
  }
  return Dmc(in, out, std::move(m));
}

// ---------------------------------------------------------------------------
// Channel averaging.

/// W_Q(y|x) = sum_s Q(s) W_s(y|x).
inline Dmc averaged_channel(std::span<const Dmc> family, const Pmf& q) {
  if (family.empty() || family.size() != q.size()) {
    throw std::invalid_argument("averaged_channel: family size does not match the PMF");
  }
  const std::size_t in = family.front().input_size();
  const std::size_t out = family.front().output_size();
  std::vector<double> m(in * out, 0.0);
  for (std::size_t s = 0; s < family.size(); ++s) {
    if (family[s].input_size() != in || family[s].output_size() != out) {
      throw std::invalid_argument("averaged_channel: channels differ in shape");
    }
    if (q[s] == 0.0) continue;
    const auto& f = family[s].flat();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += q[s] * f[i];
  }
  // Rows sum to 1 up to rounding; renormalize explicitly per row.
  for (std::size_t x = 0; x < in; ++x) {
    double total = 0.0;
    for (std::size_t y = 0; y < out; ++y) total += m[x * out + y];
    for (std::size_t y = 0; y < out; ++y) m[x * out + y] /= total;
  }
  return Dmc(in, out, std::move(m));
}

}  // namespace avwtc
