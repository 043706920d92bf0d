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

// avwtc: batch front end for capacity formulas, bounds, soft-covering
// experiments and the coupling procedure.
//
// Exit codes: 0 success, 1 numeric or feasibility failure, 2 bad input.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli_commands.hpp"

namespace {

using namespace avwtc;
using namespace avwtc::cli;

void add_optimizer_flags(CLI::App* app, OptimizerConfig& cfg) {
  app->add_option("--restarts", cfg.restarts, "random restarts of the outer search");
  app->add_option("--max-iters", cfg.max_iters, "ascent iterations per restart");
  app->add_option("--tolerance", cfg.tolerance, "ascent stopping tolerance");
  app->add_option("--seed", cfg.seed, "optimizer seed");
  app->add_option("--grid", cfg.inner_grid_resolution, "inner grid points per unit length");
}

void add_channel_flags(CLI::App* app, ChannelSource& src) {
  app->add_option("--spec", src.spec_path, "channel specification (JSON)");
  app->add_option("--builtin", src.builtin, "built-in channel family (bsbe)");
  app->add_option("--eps", src.eps, "bsbe: crossover type Q1(1)");
  app->add_option("--alpha", src.alpha, "bsbe: erasure type Q2(1)");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_atomically(out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrarily varying wiretap channel toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  std::string out_path;

  CapacityArgs cap;
  auto* c_cap = app.add_subcommand("capacity", "secrecy capacity for a fixed state type");
  add_channel_flags(c_cap, cap.source);
  c_cap->add_option("--type", cap.type, "state PMF, e.g. 0.25,0.75 (default: from the channel file)");
  add_optimizer_flags(c_cap, cap.cfg);
  c_cap->add_option("--out", out_path, "write the JSON record here");

  BsbeCurveArgs curve;
  double curve_eps = 0.0, curve_alpha = 0.0;
  auto* c_curve = app.add_subcommand("bsbe-curve", "BS-BE capacity along one parameter");
  auto* o_eps = c_curve->add_option("--eps", curve_eps, "fix eps, sweep alpha");
  auto* o_alpha = c_curve->add_option("--alpha", curve_alpha, "fix alpha, sweep eps");
  c_curve->add_option("--range", curve.range, "START:STOP:STEP")->required();
  add_optimizer_flags(c_curve, curve.cfg);
  c_curve->add_option("--out", out_path, "CSV output path");

  BoundsArgs bounds;
  double bounds_delta = 0.0;
  auto* c_bounds = app.add_subcommand("bounds", "lower and upper bounds over a constraint set");
  add_channel_flags(c_bounds, bounds.source);
  c_bounds->add_option("--set", bounds.set_kind, "singleton | box | polytope");
  c_bounds->add_option("--type", bounds.type, "center / singleton state PMF");
  auto* o_delta = c_bounds->add_option("--delta", bounds_delta, "box half-width (relative)");
  add_optimizer_flags(c_bounds, bounds.cfg);
  c_bounds->add_option("--out", out_path, "write the JSON record here");

  SoftcoverArgs sc;
  double sc_rate = 0.0, sc_offset = 0.0, sc_delta = 0.0;
  auto* c_sc = app.add_subcommand("softcover", "soft-covering exponent and simulation");
  c_sc->require_subcommand(1);
  CLI::App* sc_modes[2] = {c_sc->add_subcommand("exponent", "exponent report"),
                           c_sc->add_subcommand("sim", "per-trial exact divergences (CSV)")};
  CLI::Option* o_rate[2];
  CLI::Option* o_offset[2];
  CLI::Option* o_sc_delta[2];
  for (int i = 0; i < 2; ++i) {
    auto* m = sc_modes[i];
    m->add_option("--problem", sc.problem_path, "problem JSON (q_us, q_vus, state_seq | state_type)");
    m->add_option("--bsc", sc.bsc, "builtin: V = U through a BSC with this crossover");
    m->add_option("--q-u", sc.q_u, "builtin: PMF of U");
    o_rate[i] = m->add_option("--rate", sc_rate, "codebook rate R (bits)");
    o_offset[i] = m->add_option("--rate-offset", sc_offset, "R = I(U;V|S) + offset");
    o_sc_delta[i] = m->add_option("--delta", sc_delta, "delta (default (R - I)/2)");
    m->add_option("--n", sc.n_list, "blocklength(s), comma separated");
    m->add_option("--seed", sc.seed, "master seed");
    m->add_option("--out", out_path, "output path");
  }
  sc_modes[1]->add_option("--trials", sc.trials, "codebooks per blocklength");

  CouplingArgs cp;
  auto* c_cp = app.add_subcommand("coupling", "repair random sequences into a target type class");
  c_cp->add_option("--n", cp.n, "blocklength")->required();
  c_cp->add_option("--source", cp.source, "source type, e.g. 3/4,1/4")->required();
  c_cp->add_option("--target", cp.target, "target type")->required();
  c_cp->add_option("--trials", cp.trials, "number of random inputs");
  c_cp->add_option("--seed", cp.seed, "master seed");
  c_cp->add_option("--out", out_path, "write the JSON record here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (c_cap->parsed()) {
      emit(dump_record(cmd_capacity(cap)), out_path);
    } else if (c_curve->parsed()) {
      if (*o_eps) curve.eps = curve_eps;
      if (*o_alpha) curve.alpha = curve_alpha;
      emit(cmd_bsbe_curve(curve), out_path);
    } else if (c_bounds->parsed()) {
      if (*o_delta) bounds.delta = bounds_delta;
      emit(dump_record(cmd_bounds(bounds)), out_path);
    } else if (c_sc->parsed()) {
      const int i = sc_modes[0]->parsed() ? 0 : 1;
      if (*o_rate[i]) sc.rate = sc_rate;
      if (*o_offset[i]) sc.rate_offset = sc_offset;
      if (*o_sc_delta[i]) sc.delta = sc_delta;
      emit(i == 0 ? dump_record(cmd_softcover_exponent(sc)) : cmd_softcover_sim(sc), out_path);
    } else if (c_cp->parsed()) {
      const ResultRecord rec = cmd_coupling(cp);
      emit(dump_record(rec), out_path);
      if (rec.outputs["membership_pass_rate"].get<double>() != 1.0 ||
          rec.outputs["k_identity_pass_rate"].get<double>() != 1.0) {
        std::cerr << "error: coupling property check failed\n";
        return kExitNumeric;
      }
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidTypeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
