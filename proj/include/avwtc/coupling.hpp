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

// Randomized repair of a state sequence into an exact target type class: pick
// a position whose symbol is over quota, overwrite it with an under-quota
// symbol, repeat. Also an exact and a chi-square check that a uniform input
// over one type class maps to a uniform output over the target class.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "avwtc/errors.hpp"
#include "avwtc/prob.hpp"
#include "avwtc/rng.hpp"

namespace avwtc {

struct Flip {
  std::size_t position;
  std::size_t old_symbol;
  std::size_t new_symbol;
  bool operator==(const Flip&) const = default;
};

struct CouplingTrace {
  Sequence input_seq;
  Sequence output_seq;
  std::size_t iterations = 0;  ///< K
  std::vector<Flip> flips;
};

/// Sum over over-quota symbols of N(s|seq) - n target(s).
inline std::size_t deficiency_count(const Sequence& s, const Pmf& target) {
  const auto quota = type_counts(target, s.size());
  const auto counts = symbol_counts(s, target.size());
  std::size_t k = 0;
  for (std::size_t a = 0; a < quota.size(); ++a) {
    if (counts[a] > quota[a]) k += counts[a] - quota[a];
  }
  return k;
}

/// The same sum taken over under-quota symbols; always equals deficiency_count.
inline std::size_t surplus_count(const Sequence& s, const Pmf& target) {
  const auto quota = type_counts(target, s.size());
  const auto counts = symbol_counts(s, target.size());
  std::size_t k = 0;
  for (std::size_t a = 0; a < quota.size(); ++a) {
    if (counts[a] < quota[a]) k += quota[a] - counts[a];
  }
  return k;
}

namespace detail {

struct CouplingState {
  Sequence seq;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> quota;

  std::vector<std::size_t> over_positions() const {
    std::vector<std::size_t> j;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (counts[seq[i]] > quota[seq[i]]) j.push_back(i);
    }
    return j;
  }
  std::vector<std::size_t> under_symbols() const {
    std::vector<std::size_t> l;
    for (std::size_t a = 0; a < counts.size(); ++a) {
      if (counts[a] < quota[a]) l.push_back(a);
    }
    return l;
  }
  void assign(std::size_t pos, std::size_t sym) {
    --counts[seq[pos]];
    ++counts[sym];
    seq[pos] = sym;
  }
};

inline CouplingState start_state(const Sequence& s, const Pmf& target) {
  return {s, symbol_counts(s, target.size()), type_counts(target, s.size())};
}

}  // namespace detail

/// Moves s into the type class of target. Each step draws a position uniformly
/// from the over-quota positions, then a symbol uniformly from the under-quota
/// symbols.
inline CouplingTrace couple(const Sequence& s, const Pmf& target, std::uint64_t seed) {
  if (s.empty()) throw std::invalid_argument("couple: empty sequence");
  auto st = detail::start_state(s, target);
  Rng rng = make_rng(seed);
  CouplingTrace trace{s, {}, 0, {}};
  while (true) {
    const auto j = st.over_positions();
    if (j.empty()) break;
    const auto l = st.under_symbols();
    const std::size_t pos = j[uniform_index(rng, j.size())];
    const std::size_t sym = l[uniform_index(rng, l.size())];
    trace.flips.push_back({pos, st.seq[pos], sym});
    st.assign(pos, sym);
    ++trace.iterations;
  }
  trace.output_seq = std::move(st.seq);
  return trace;
}

struct UniformityResult {
  bool exact = false;
  double statistic = 0.0;  ///< max |P(out) - 1/|T|| when exact, chi-square otherwise
  double p_value = 1.0;    ///< chi-square upper tail; 1 in exact mode
  std::size_t classes = 0; ///< |T| of the target
  bool passed = false;
};

enum class UniformityMode { kAuto, kExact, kStatistical };

/// Largest n for which kAuto picks the exact path enumeration.
inline constexpr std::size_t kExactCouplingMaxN = 8;
inline constexpr double kExactUniformityTolerance = 1e-10;
inline constexpr std::size_t kMinUniformitySamples = 100000;

namespace detail {

inline void enumerate_paths(CouplingState& st, double prob, std::map<Sequence, double>& out,
                            std::uint64_t& leaves) {
  const auto j = st.over_positions();
  if (j.empty()) {
    out[st.seq] += prob;
    if (++leaves > kEnumerationLimit) {
      throw SizeLimitError("marginal_uniformity_test: too many random-choice paths");
    }
    return;
  }
  const auto l = st.under_symbols();
  const double step = prob / static_cast<double>(j.size() * l.size());
  for (auto pos : j) {
    for (auto sym : l) {
      const std::size_t old = st.seq[pos];
      st.assign(pos, sym);
      enumerate_paths(st, step, out, leaves);
      st.assign(pos, old);
    }
  }
}

inline Sequence sequence_of_type(const std::vector<std::size_t>& counts) {
  Sequence s;
  for (std::size_t a = 0; a < counts.size(); ++a) s.insert(s.end(), counts[a], a);
  return s;
}

}  // namespace detail

/// Checks that an input drawn uniformly from the source type class is mapped
/// to the uniform law on the target type class. kAuto enumerates exactly for
/// n <= 8 and otherwise runs a chi-square goodness-of-fit test at the given
/// significance.
inline UniformityResult marginal_uniformity_test(const Pmf& source, const Pmf& target,
                                                 std::size_t n, std::uint64_t seed = 0,
                                                 std::size_t samples = kMinUniformitySamples,
                                                 double significance = 0.01,
                                                 UniformityMode mode = UniformityMode::kAuto) {
  if (source.size() != target.size()) {
    throw std::invalid_argument("marginal_uniformity_test: alphabet sizes differ");
  }
  const auto src_counts = type_counts(source, n);
  const auto tgt_counts = type_counts(target, n);
  const double class_size = static_cast<double>(multinomial(tgt_counts));
  if (class_size > 1e6) throw SizeLimitError("marginal_uniformity_test: target class too large");

  // All target-class sequences, lexicographically ordered.
  std::vector<Sequence> targets;
  Sequence t = detail::sequence_of_type(tgt_counts);
  do targets.push_back(t);
  while (std::next_permutation(t.begin(), t.end()));

  UniformityResult r;
  r.classes = targets.size();
  const double u = 1.0 / static_cast<double>(targets.size());

  const bool exact = mode == UniformityMode::kExact ||
                     (mode == UniformityMode::kAuto && n <= kExactCouplingMaxN);
  if (exact) {
    std::map<Sequence, double> out;
    std::uint64_t leaves = 0;
    Sequence s = detail::sequence_of_type(src_counts);
    const double src_size = static_cast<double>(multinomial(src_counts));
    do {
      auto st = detail::start_state(s, target);
      detail::enumerate_paths(st, 1.0 / src_size, out, leaves);
    } while (std::next_permutation(s.begin(), s.end()));
    double dev = 0.0;
    for (const auto& seq : targets) {
      const auto it = out.find(seq);
      dev = std::max(dev, std::abs((it == out.end() ? 0.0 : it->second) - u));
    }
    // Mass outside the target class would also be a failure.
    double inside = 0.0;
    for (const auto& [seq, p] : out) {
      if (std::binary_search(targets.begin(), targets.end(), seq)) inside += p;
    }
    dev = std::max(dev, std::abs(1.0 - inside));
    r.exact = true;
    r.statistic = dev;
    r.passed = dev <= kExactUniformityTolerance;
    return r;
  }

  if (samples < kMinUniformitySamples) {
    throw std::invalid_argument("marginal_uniformity_test: need at least 1e5 samples");
  }
  std::vector<double> hits(targets.size(), 0.0);
  const Sequence base = detail::sequence_of_type(src_counts);
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng = make_rng(seed, 2 * i);
    Sequence s = base;
    for (std::size_t k = s.size(); k > 1; --k) std::swap(s[k - 1], s[uniform_index(rng, k)]);
    const auto tr = couple(s, target, derive_seed(seed, 2 * i + 1));
    const auto it = std::lower_bound(targets.begin(), targets.end(), tr.output_seq);
    if (it == targets.end() || *it != tr.output_seq) {
      throw std::logic_error("marginal_uniformity_test: output left the target class");
    }
    hits[static_cast<std::size_t>(it - targets.begin())] += 1.0;
  }
  const double expected = static_cast<double>(samples) * u;
  double chi2 = 0.0;
  for (double h : hits) chi2 += (h - expected) * (h - expected) / expected;
  r.statistic = chi2;
  if (targets.size() > 1) {
    boost::math::chi_squared dist(static_cast<double>(targets.size() - 1));
    r.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  }
  r.passed = r.p_value >= significance;
  return r;
}

}  // namespace avwtc
