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

// Command implementations behind the avwtc executable: channel-spec loading,
// result records, CSV emission and one function per subcommand. Each command
// is a thin adapter over a library call.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "avwtc/avwtc.hpp"

namespace avwtc::cli {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Bad input: malformed files, flags or values. Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitInput = 2;

// ---------------------------------------------------------------------------
// Formatting and output.

/// 17 significant digits: round-trips every double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes `content` to `path` through a temporary file and a rename.
inline void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw InputError("cannot write " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot write " + path);
  }
}

struct ResultRecord {
  std::string command;
  Json parameters = Json::object();
  Json outputs = Json::object();
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
  double wall_time_s = 0.0;

  bool operator==(const ResultRecord&) const = default;
};

inline void to_json(Json& j, const ResultRecord& r) {
  j = Json{{"command", r.command},   {"parameters", r.parameters}, {"outputs", r.outputs},
           {"seed", r.seed},         {"version", r.version},       {"wall_time_s", r.wall_time_s}};
}

inline void from_json(const Json& j, ResultRecord& r) {
  j.at("command").get_to(r.command);
  r.parameters = j.at("parameters");
  r.outputs = j.at("outputs");
  j.at("seed").get_to(r.seed);
  j.at("version").get_to(r.version);
  j.at("wall_time_s").get_to(r.wall_time_s);
}

/// Serializes with full double precision (nlohmann emits shortest round-trip).
inline std::string dump_record(const ResultRecord& r) { return Json(r).dump(2) + "\n"; }

inline ResultRecord parse_record(const std::string& text) { return Json::parse(text).get<ResultRecord>(); }

// ---------------------------------------------------------------------------
// Parsing helpers.

/// "line L, column C" for a byte offset into text (1-based, offset counts the
/// bytes consumed by the parser).
inline std::string line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(origin + ": JSON syntax error at " + line_column(text, e.byte) + ": " +
                     e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double parse_number(const std::string& token, const std::string& what) {
  const auto slash = token.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string a = token.substr(0, slash), b = token.substr(slash + 1);
      std::size_t ua = 0, ub = 0;
      const double num = std::stod(a, &ua);
      const double den = std::stod(b, &ub);
      if (ua != a.size() || ub != b.size() || den == 0.0) throw std::invalid_argument("");
      return num / den;
    }
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": '" + token + "' is not a number");
  }
}

/// Comma-separated numbers; fractions like 1/3 are accepted.
inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(parse_number(token, what));
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

/// Values must be nonnegative and sum to 1 within 1e-9; they are renormalized.
inline Pmf pmf_from_values(const std::vector<double>& v, const std::string& what) {
  double sum = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) throw InputError(what + ": entries must be finite and >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InputError(what + " sums to " + format_double(sum) + ", expected 1");
  }
  return Pmf::normalized(v);
}

inline Pmf parse_pmf(const std::string& text, const std::string& what) {
  return pmf_from_values(parse_list(text, what), what);
}

struct RangeSpec {
  double start, stop, step;
  std::vector<double> points() const {
    std::vector<double> p;
    for (std::size_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + 1e-9 * step) break;
      p.push_back(std::min(v, stop));
    }
    return p;
  }
};

/// START:STOP:STEP with STEP > 0 and START <= STOP.
inline RangeSpec parse_range(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ':')) v.push_back(parse_number(token, "--range"));
  if (v.size() != 3) throw InputError("--range must be START:STOP:STEP");
  if (!(v[2] > 0.0) || v[0] > v[1]) throw InputError("--range needs STEP > 0 and START <= STOP");
  return {v[0], v[1], v[2]};
}

// ---------------------------------------------------------------------------
// Channel specification files.

struct ChannelSpec {
  Avwtc channel;
  std::optional<Pmf> state_pmf;
  std::optional<ConstraintSet> constraint;
};

namespace detail {

inline Dmc matrix_from_json(const Json& m, std::size_t input_size, const std::string& where) {
  if (!m.is_array() || m.empty()) throw InputError(where + ": expected a nonempty matrix");
  if (m.size() != input_size) {
    throw InputError(where + ": has " + std::to_string(m.size()) + " rows, input_size is " +
                     std::to_string(input_size));
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.size(); ++r) {
    const std::string row_name = where + " row " + std::to_string(r);
    if (!m[r].is_array() || m[r].empty()) throw InputError(row_name + ": expected an array");
    std::vector<double> row;
    for (const auto& e : m[r]) {
      if (!e.is_number()) throw InputError(row_name + ": entries must be numbers");
      row.push_back(e.get<double>());
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(row_name + ": row length differs from row 0");
    }
    rows.push_back(pmf_from_values(row, row_name).vec());
  }
  return Dmc(rows);
}

inline std::vector<double> numbers_from_json(const Json& a, const std::string& where) {
  if (!a.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& e : a) {
    if (!e.is_number()) throw InputError(where + ": entries must be numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace detail

/// Parses a channel specification document.
///
/// Keys: input_size, state_count, main (one matrix per state), eaves (one
/// matrix per state), optional state_pmf, optional constraint
/// ({"box": {"center": [...], "delta": d}} or {"vertices": [[...], ...]}).
inline ChannelSpec parse_channel_spec(const std::string& text, const std::string& origin) {
  const Json j = parse_json_text(text, origin);
  if (!j.is_object()) throw InputError(origin + ": top level must be an object");
  auto need = [&](const char* key) -> const Json& {
    if (!j.contains(key)) throw InputError(origin + ": missing key '" + key + "'");
    return j.at(key);
  };
  const Json& in = need("input_size");
  const Json& sc = need("state_count");
  if (!in.is_number_unsigned() || in.get<std::size_t>() == 0) {
    throw InputError(origin + ": input_size must be a positive integer");
  }
  if (!sc.is_number_unsigned() || sc.get<std::size_t>() == 0) {
    throw InputError(origin + ": state_count must be a positive integer");
  }
  const std::size_t nx = in.get<std::size_t>(), k = sc.get<std::size_t>();
  std::vector<Dmc> main, eaves;
  for (const char* key : {"main", "eaves"}) {
    const Json& list = need(key);
    if (!list.is_array() || list.size() != k) {
      throw InputError(origin + ": '" + key + "' must list " + std::to_string(k) + " matrices");
    }
    for (std::size_t s = 0; s < k; ++s) {
      auto m = detail::matrix_from_json(list[s], nx, std::string(key) + "[" + std::to_string(s) + "]");
      (std::string(key) == "main" ? main : eaves).push_back(std::move(m));
    }
  }
  for (std::size_t s = 1; s < k; ++s) {
    if (main[s].output_size() != main[0].output_size()) {
      throw InputError("main[" + std::to_string(s) + "]: output size differs from main[0]");
    }
    if (eaves[s].output_size() != eaves[0].output_size()) {
      throw InputError("eaves[" + std::to_string(s) + "]: output size differs from eaves[0]");
    }
  }
  ChannelSpec spec{Avwtc(std::move(main), std::move(eaves)), std::nullopt, std::nullopt};
  if (j.contains("state_pmf")) {
    spec.state_pmf = pmf_from_values(detail::numbers_from_json(j["state_pmf"], "state_pmf"), "state_pmf");
    if (spec.state_pmf->size() != k) throw InputError("state_pmf: length must equal state_count");
  }
  if (j.contains("constraint")) {
    const Json& c = j["constraint"];
    if (c.contains("box")) {
      const Json& b = c["box"];
      if (!b.contains("center") || !b.contains("delta") || !b["delta"].is_number()) {
        throw InputError("constraint.box: needs 'center' and numeric 'delta'");
      }
      const Pmf center =
          pmf_from_values(detail::numbers_from_json(b["center"], "constraint.box.center"),
                          "constraint.box.center");
      if (center.size() != k) throw InputError("constraint.box.center: length must equal state_count");
      const double delta = b["delta"].get<double>();
      if (!(delta >= 0.0)) throw InputError("constraint.box.delta must be >= 0");
      spec.constraint = ConstraintSet::box(center, delta);
    } else if (c.contains("vertices")) {
      const Json& vs = c["vertices"];
      if (!vs.is_array() || vs.empty()) throw InputError("constraint.vertices: need at least one vertex");
      std::vector<Pmf> vertices;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string name = "constraint.vertices[" + std::to_string(i) + "]";
        vertices.push_back(pmf_from_values(detail::numbers_from_json(vs[i], name), name));
        if (vertices.back().size() != k) throw InputError(name + ": length must equal state_count");
      }
      spec.constraint = ConstraintSet::polytope(std::move(vertices));
    } else {
      throw InputError("constraint: expected 'box' or 'vertices'");
    }
  }
  return spec;
}

inline ChannelSpec load_channel_spec(const std::string& path) {
  return parse_channel_spec(read_file(path), path);
}

inline ChannelSpec builtin_bsbe(double eps, double alpha) {
  if (!(eps >= 0.0 && eps <= 1.0) || !(alpha >= 0.0 && alpha <= 1.0)) {
    throw InputError("--eps and --alpha must lie in [0, 1]");
  }
  return {bsbe_channel(), bsbe_state_pmf(eps, alpha), std::nullopt};
}

inline Json to_json_vector(const std::vector<double>& v) { return Json(v); }

// ---------------------------------------------------------------------------
// Commands.

struct ChannelSource {
  std::string spec_path;
  std::string builtin;
  double eps = 0.1;
  double alpha = 0.5;

  ChannelSpec load() const {
    if (!spec_path.empty() && !builtin.empty()) throw InputError("use either --spec or --builtin");
    if (!spec_path.empty()) return load_channel_spec(spec_path);
    if (builtin == "bsbe") return builtin_bsbe(eps, alpha);
    if (builtin.empty()) throw InputError("a channel is required: --spec FILE or --builtin bsbe");
    throw InputError("unknown builtin '" + builtin + "'");
  }

  Json describe() const {
    if (!spec_path.empty()) return Json{{"spec", spec_path}};
    return Json{{"builtin", builtin}, {"eps", eps}, {"alpha", alpha}};
  }
};

inline Json describe_config(const OptimizerConfig& cfg) {
  return Json{{"restarts", cfg.restarts},
              {"max_iters", cfg.max_iters},
              {"tolerance", cfg.tolerance},
              {"seed", cfg.seed},
              {"inner_grid_resolution", cfg.inner_grid_resolution}};
}

inline void check_config(const OptimizerConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct CapacityArgs {
  ChannelSource source;
  std::string type;  ///< overrides the channel file's state PMF when set
  OptimizerConfig cfg;
};

inline ResultRecord cmd_capacity(const CapacityArgs& a) {
  check_config(a.cfg);
  const Timer timer;
  const ChannelSpec spec = a.source.load();
  Pmf q_s = a.type.empty() ? (spec.state_pmf ? *spec.state_pmf
                                             : throw InputError("no state type: pass --type"))
                           : parse_pmf(a.type, "--type");
  if (q_s.size() != spec.channel.state_count()) {
    throw InputError("--type: length must equal the channel's state count");
  }
  const auto r = capacity_thm1(spec.channel, q_s, a.cfg);
  ResultRecord rec{"capacity", a.source.describe(), {}, a.cfg.seed};
  rec.parameters["type"] = q_s.vec();
  rec.parameters["optimizer"] = describe_config(a.cfg);
  rec.outputs = Json{{"capacity", r.value},
                     {"raw", r.raw},
                     {"argmax_qux", r.argmax.table()},
                     {"argmax_dims", {r.argmax.u_size(), r.argmax.x_size()}}};
  rec.wall_time_s = timer.seconds();
  return rec;
}

struct BsbeCurveArgs {
  std::optional<double> eps;
  std::optional<double> alpha;
  std::string range;
  OptimizerConfig cfg;
};

/// CSV `param,capacity`, one row per grid point; the free parameter is the one
/// not fixed on the command line.
inline std::string cmd_bsbe_curve(const BsbeCurveArgs& a) {
  check_config(a.cfg);
  if (a.eps.has_value() == a.alpha.has_value()) {
    throw InputError("bsbe-curve: fix exactly one of --eps and --alpha");
  }
  const auto points = parse_range(a.range).points();
  for (double p : points) {
    if (p < 0.0 || p > 1.0) throw InputError("--range: grid points must lie in [0, 1]");
  }
  const double fixed = a.eps ? *a.eps : *a.alpha;
  if (!(fixed >= 0.0 && fixed <= 1.0)) throw InputError("--eps/--alpha must lie in [0, 1]");
  std::string csv = "param,capacity\n";
  for (double p : points) {
    const double v = a.eps ? bsbe_capacity(*a.eps, p, a.cfg).value : bsbe_capacity(p, *a.alpha, a.cfg).value;
    csv += format_double(p) + "," + format_double(v) + "\n";
  }
  return csv;
}

struct BoundsArgs {
  ChannelSource source;
  std::string set_kind;  ///< singleton | box | polytope, empty for the channel file's constraint
  std::string type;
  std::optional<double> delta;
  OptimizerConfig cfg;
};

inline ConstraintSet resolve_set(const BoundsArgs& a, const ChannelSpec& spec) {
  auto center = [&]() {
    if (!a.type.empty()) return parse_pmf(a.type, "--type");
    if (spec.state_pmf) return *spec.state_pmf;
    throw InputError("no state type: pass --type");
  };
  if (a.set_kind.empty()) {
    if (spec.constraint) return *spec.constraint;
    if (a.delta) return ConstraintSet::box(center(), *a.delta);
    return ConstraintSet::singleton(center());
  }
  if (a.set_kind == "singleton") return ConstraintSet::singleton(center());
  if (a.set_kind == "box") {
    if (!a.delta) throw InputError("--set box needs --delta");
    if (!(*a.delta >= 0.0)) throw InputError("--delta must be >= 0");
    return ConstraintSet::box(center(), *a.delta);
  }
  if (a.set_kind == "polytope") {
    if (!spec.constraint || !std::holds_alternative<PolytopeSet>(spec.constraint->variant())) {
      throw InputError("--set polytope needs 'constraint.vertices' in the channel file");
    }
    return *spec.constraint;
  }
  throw InputError("--set must be singleton, box or polytope");
}

inline ResultRecord cmd_bounds(const BoundsArgs& a) {
  check_config(a.cfg);
  const Timer timer;
  const ChannelSpec spec = a.source.load();
  const ConstraintSet set = resolve_set(a, spec);
  if (set.state_count() != spec.channel.state_count()) {
    throw InputError("constraint set size must equal the channel's state count");
  }
  const auto lb = lower_bound_thm2(spec.channel, set, a.cfg);
  const auto ub = upper_bound_thm3(spec.channel, set, a.cfg, {lb.argmax});
  ResultRecord rec{"bounds", a.source.describe(), {}, a.cfg.seed};
  Json vertices = Json::array();
  for (const auto& v : set.vertices()) vertices.push_back(v.vec());
  rec.parameters["set_vertices"] = vertices;
  rec.parameters["optimizer"] = describe_config(a.cfg);
  rec.outputs = Json{{"lower", lb.value},
                     {"lower_raw", lb.raw},
                     {"lower_tolerance", lb.tolerance},
                     {"lower_argmax", lb.argmax},
                     {"lower_argmax_dims", lb.argmax_dims},
                     {"upper", ub.value},
                     {"upper_raw", ub.raw},
                     {"upper_tolerance", ub.tolerance},
                     {"upper_argmax", ub.argmax},
                     {"upper_argmax_dims", ub.argmax_dims},
                     {"gap", ub.value - lb.value}};
  rec.wall_time_s = timer.seconds();
  return rec;
}

struct SoftcoverArgs {
  std::string problem_path;  ///< JSON problem; empty for the binary builtin
  double bsc = 0.1;          ///< builtin: V = U through a BSC
  std::string q_u = "0.5,0.5";
  std::optional<double> rate;
  std::optional<double> rate_offset;  ///< R = I(U;V|S) + offset
  std::optional<double> delta;
  std::string n_list = "8";
  std::size_t trials = 200;
  std::uint64_t seed = 0;
};

struct ProblemTemplate {
  Dmc q_us;
  std::vector<Dmc> q_vus;
  std::optional<Sequence> state_seq;
  std::optional<Pmf> state_type;

  Sequence sequence_for(std::size_t n) const {
    if (state_seq) {
      if (state_seq->size() != n) {
        throw InputError("problem state_seq has length " + std::to_string(state_seq->size()) +
                         ", requested n = " + std::to_string(n));
      }
      return *state_seq;
    }
    const Pmf t = state_type ? *state_type : Pmf::point_mass(q_us.input_size(), 0);
    std::vector<std::size_t> counts;
    try {
      counts = type_counts(t, n);
    } catch (const InvalidTypeError& e) {
      throw InputError(std::string("state_type: ") + e.what());
    }
    Sequence s;
    for (std::size_t a = 0; a < counts.size(); ++a) s.insert(s.end(), counts[a], a);
    return s;
  }
};

inline ProblemTemplate load_problem(const SoftcoverArgs& a) {
  if (a.problem_path.empty()) {
    if (!(a.bsc >= 0.0 && a.bsc <= 1.0)) throw InputError("--bsc must lie in [0, 1]");
    const Pmf q_u = parse_pmf(a.q_u, "--q-u");
    if (q_u.size() != 2) throw InputError("--q-u must have two entries for the BSC builtin");
    return {Dmc::constant(1, q_u), {Dmc::bsc(a.bsc)}, std::nullopt, std::nullopt};
  }
  const std::string text = read_file(a.problem_path);
  const Json j = parse_json_text(text, a.problem_path);
  if (!j.is_object() || !j.contains("q_us") || !j.contains("q_vus")) {
    throw InputError(a.problem_path + ": needs 'q_us' and 'q_vus'");
  }
  const Json& qus = j["q_us"];
  if (!qus.is_array() || qus.empty()) throw InputError("q_us: expected a nonempty matrix");
  ProblemTemplate p{detail::matrix_from_json(qus, qus.size(), "q_us"), {}, std::nullopt, std::nullopt};
  const Json& qv = j["q_vus"];
  if (!qv.is_array() || qv.size() != p.q_us.input_size()) {
    throw InputError("q_vus: need one matrix per state");
  }
  for (std::size_t s = 0; s < qv.size(); ++s) {
    p.q_vus.push_back(detail::matrix_from_json(qv[s], p.q_us.output_size(),
                                               "q_vus[" + std::to_string(s) + "]"));
    if (p.q_vus.back().output_size() != p.q_vus.front().output_size()) {
      throw InputError("q_vus[" + std::to_string(s) + "]: output size differs from q_vus[0]");
    }
  }
  if (j.contains("state_seq")) {
    Sequence s;
    for (const auto& e : j["state_seq"]) {
      if (!e.is_number_unsigned() || e.get<std::size_t>() >= p.q_us.input_size()) {
        throw InputError("state_seq: entries must be state indices");
      }
      s.push_back(e.get<std::size_t>());
    }
    if (s.empty()) throw InputError("state_seq: must be nonempty");
    p.state_seq = s;
  }
  if (j.contains("state_type")) {
    p.state_type = pmf_from_values(detail::numbers_from_json(j["state_type"], "state_type"), "state_type");
    if (p.state_type->size() != p.q_us.input_size()) {
      throw InputError("state_type: length must equal the number of states");
    }
  }
  return p;
}

inline SoftCoverProblem make_problem(const ProblemTemplate& t, std::size_t n, const SoftcoverArgs& a) {
  SoftCoverProblem prob{t.q_us, t.q_vus, t.sequence_for(n), 0.0};
  if (a.rate.has_value() == a.rate_offset.has_value()) {
    throw InputError("softcover: pass exactly one of --rate and --rate-offset");
  }
  prob.rate = a.rate ? *a.rate : conditional_mutual_info_under_type(prob) + *a.rate_offset;
  if (!(prob.rate >= 0.0) || !std::isfinite(prob.rate)) throw InputError("rate must be >= 0");
  return prob;
}

inline std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_list(text, "--n")) {
    if (!(v >= 1.0) || v != std::floor(v)) throw InputError("--n: blocklengths must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

inline void check_delta(const SoftcoverArgs& a) {
  if (a.delta && !(*a.delta > 0.0 && std::isfinite(*a.delta))) {
    throw InputError("--delta must be finite and > 0");
  }
}

inline Json report_json(const ExponentReport& r) {
  return Json{{"delta", r.delta},
              {"gamma_delta", r.gamma_delta},
              {"c_delta", r.c_delta},
              {"eta_star", std::isinf(r.eta_star) ? Json("inf") : Json(r.eta_star)},
              {"gamma_star", r.gamma_star},
              {"beta_eta_delta", r.beta_eta_delta},
              {"epsilon_eta_delta", r.epsilon_eta_delta},
              {"alpha", r.alpha},
              {"cond_mi", r.cond_mi}};
}

inline ResultRecord cmd_softcover_exponent(const SoftcoverArgs& a) {
  check_delta(a);
  const Timer timer;
  const auto t = load_problem(a);
  const auto ns = parse_n_list(a.n_list);
  const SoftCoverProblem prob = make_problem(t, ns.front(), a);
  ResultRecord rec{"softcover exponent", {}, {}, a.seed};
  rec.parameters = Json{{"rate", prob.rate}, {"n", ns.front()}};
  if (a.delta) rec.parameters["delta"] = *a.delta;
  rec.outputs = report_json(soft_cover_exponent(prob, a.delta));
  rec.wall_time_s = timer.seconds();
  return rec;
}

/// CSV `n,trial,divergence,threshold,fail`; trials for each n use the same
/// master seed, so the CSV depends only on the arguments.
inline std::string cmd_softcover_sim(const SoftcoverArgs& a) {
  check_delta(a);
  if (a.trials == 0) throw InputError("--trials must be >= 1");
  const auto t = load_problem(a);
  std::string csv = "n,trial,divergence,threshold,fail\n";
  for (std::size_t n : parse_n_list(a.n_list)) {
    const SoftCoverProblem prob = make_problem(t, n, a);
    const auto r = soft_cover_trials(prob, a.trials, a.seed, a.delta);
    for (std::size_t i = 0; i < r.divergences.size(); ++i) {
      csv += std::to_string(n) + "," + std::to_string(i) + "," + format_double(r.divergences[i]) +
             "," + format_double(r.threshold) + "," + (r.divergences[i] > r.threshold ? "1" : "0") +
             "\n";
    }
  }
  return csv;
}

struct CouplingArgs {
  std::size_t n = 4;
  std::string source;
  std::string target;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

inline ResultRecord cmd_coupling(const CouplingArgs& a) {
  const Timer timer;
  if (a.trials == 0) throw InputError("--trials must be >= 1");
  const Pmf source = parse_pmf(a.source, "--source");
  const Pmf target = parse_pmf(a.target, "--target");
  if (source.size() != target.size()) throw InputError("--source and --target differ in length");
  std::vector<std::size_t> src_counts;
  try {
    src_counts = type_counts(source, a.n);
    type_counts(target, a.n);
  } catch (const InvalidTypeError& e) {
    throw InputError(e.what());
  }
  Sequence base;
  for (std::size_t s = 0; s < src_counts.size(); ++s) base.insert(base.end(), src_counts[s], s);

  std::map<std::size_t, std::size_t> histogram;
  std::size_t members = 0, k_matches = 0, max_distance = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    Rng rng = make_rng(a.seed, 2 * t);
    Sequence s = base;
    for (std::size_t k = s.size(); k > 1; --k) std::swap(s[k - 1], s[uniform_index(rng, k)]);
    const auto tr = couple(s, target, derive_seed(a.seed, 2 * t + 1));
    ++histogram[tr.iterations];
    members += symbol_counts(tr.output_seq, target.size()) == type_counts(target, a.n);
    k_matches += tr.iterations == deficiency_count(s, target) &&
                 hamming_distance(s, tr.output_seq) == tr.iterations;
    max_distance = std::max(max_distance, hamming_distance(s, tr.output_seq));
  }
  Json hist = Json::object();
  for (const auto& [k, c] : histogram) hist[std::to_string(k)] = c;
  ResultRecord rec{"coupling", {}, {}, a.seed};
  rec.parameters = Json{{"n", a.n}, {"source", source.vec()}, {"target", target.vec()},
                        {"trials", a.trials}};
  rec.outputs = Json{{"k_histogram", hist},
                     {"max_hamming_distance", max_distance},
                     {"membership_pass_rate", static_cast<double>(members) / a.trials},
                     {"k_identity_pass_rate", static_cast<double>(k_matches) / a.trials}};
  rec.wall_time_s = timer.seconds();
  return rec;
}

}  // namespace avwtc::cli
