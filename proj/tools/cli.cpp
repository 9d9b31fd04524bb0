// Copyright 2026 The hsvirial Authors
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

#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "hsvirial/error.hpp"
#include "hsvirial/io.hpp"
#include "hsvirial/virial.hpp"

namespace hsvirial::cli {

namespace {

using nlohmann::json;

// "-" or empty means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::invalid_argument("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file " + path);
  return in;
}

PhasePoint initial_state(const RunConfig& cfg) {
  if (!cfg.state_file.empty()) {
    auto in = open_input(cfg.state_file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw FormatError("state file " + cfg.state_file + ": " + e.what());
    }
    return state_from_json(doc);
  }
  return sample_initial(cfg.ensemble(), 0);
}

void print_suite(std::ostream& log, const SuiteReport& rep) {
  auto line = [&](const char* name, bool ok, const std::string& detail) {
    log << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
  };
  log << "trajectories=" << rep.trajectories << " events=" << rep.events << '\n';
  line("illner-identity", rep.identity_ok, "max_rel_residual=" + format_real(rep.max_identity_residual));
  line("jump-sign", rep.sign_ok, "max_incoming_normal=" + format_real(rep.max_incoming_normal));
  line("conservation", rep.conservation_ok,
       "event_energy=" + format_real(rep.max_event_energy_rel) +
           " event_momentum=" + format_real(rep.max_event_momentum_rel) +
           " energy_drift=" + format_real(rep.max_energy_drift) +
           " momentum_drift=" + format_real(rep.max_momentum_drift));
  line("inertia-lemma", rep.inertia_ok, "min_slack=" + format_real(rep.min_inertia_slack));
  line("r-bound", rep.r_bound_ok, "min_slack=" + format_real(rep.min_r_bound_slack));
  line("total-strength-bound", rep.total_bound_ok, "min_slack=" + format_real(rep.min_total_bound_slack));
  line("optimal-lambda-bound", rep.optimal_bound_ok,
       "min_slack=" + format_real(rep.min_optimal_bound_slack));
}

std::string default_summary_path(const RunConfig& cfg) {
  if (!cfg.summary.empty()) return cfg.summary;
  if (cfg.out.empty() || cfg.out == "-") return {};
  return cfg.out + ".summary.csv";
}

}  // namespace

void RunConfig::validate() const {
  if (mode != "simulate" && mode != "verify" && mode != "ensemble") {
    throw std::invalid_argument("unknown mode '" + mode + "'");
  }
  if (n < 1) throw std::invalid_argument("--n must be >= 1");
  if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("--dim must be in [2, 8]");
  if (samples < 1) throw std::invalid_argument("--samples must be >= 1");
  if (mode == "ensemble" && (s_order < 2 || s_order > n)) {
    throw std::invalid_argument("--s-order must satisfy 2 <= s <= N");
  }
  if (c_d && !(*c_d > 0.0)) throw std::invalid_argument("--c-d must be positive");
  if (t_end && !(*t_end >= 0.0)) throw std::invalid_argument("--t-end must be >= 0");
  if (!(max_time > 0.0)) throw std::invalid_argument("--max-time must be positive");
  (void)parse_position_law(position_law);
  (void)parse_velocity_law(velocity_law);
}

InitialEnsemble RunConfig::ensemble() const {
  InitialEnsemble ens;
  ens.n = n;
  ens.dim = dim;
  ens.position_law = parse_position_law(position_law);
  ens.position_scale = radius;
  ens.velocity_law = parse_velocity_law(velocity_law);
  ens.velocity_scale = sigma;
  ens.drift = drift;
  ens.seed = seed;
  return ens;
}

FlowOptions RunConfig::flow() const {
  FlowOptions f;
  f.max_events = max_events;
  f.max_time = max_time;
  f.tol_time = tol_time;
  f.fault_inject = fault_inject;
  return f;
}

double RunConfig::resolved_c_d() const { return c_d ? *c_d : default_c_d(n); }

json RunConfig::to_json() const {
  json j = {{"mode", mode},
            {"n", n},
            {"dim", dim},
            {"seed", seed},
            {"samples", samples},
            {"position_law", position_law},
            {"radius", radius},
            {"velocity_law", velocity_law},
            {"sigma", sigma},
            {"drift", drift},
            {"until_dispersal", !t_end.has_value()},
            {"max_time", max_time},
            {"max_events", max_events},
            {"tol_time", tol_time},
            {"identity_tol", identity_tol},
            {"fault_inject", fault_inject}};
  if (t_end) j["t_end"] = *t_end;
  if (mode == "ensemble") {
    j["s_order"] = s_order;
    j["c_d"] = resolved_c_d();
  }
  if (!state_file.empty()) j["state_file"] = state_file;
  if (!trajectory_file.empty()) j["trajectory_file"] = trajectory_file;
  return j;
}

int run_simulate(const RunConfig& cfg, std::ostream& log) {
  const PhasePoint z = initial_state(cfg);
  const Trajectory traj =
      cfg.t_end ? evolve(z, 0.0, *cfg.t_end, cfg.flow()) : evolve_to_dispersal(z, 0.0, cfg.flow());
  Output out(cfg.out);
  write_trajectory(out.stream(), traj, cfg.to_json());
  log << "events=" << traj.events.size() << " final_time=" << format_real(traj.final_time)
      << " dispersed=" << (traj.dispersed ? "true" : "false")
      << " total_strength=" << format_real(traj.jump_sum()) << '\n';
  return kOk;
}

int run_verify(const RunConfig& cfg, std::ostream& log) {
  SuiteTolerances tol;
  tol.identity_rel = cfg.identity_tol;
  SuiteReport rep;
  if (!cfg.trajectory_file.empty()) {
    auto in = open_input(cfg.trajectory_file);
    rep = run_suite(read_trajectory(in), tol);
  } else {
    const InitialEnsemble ens = cfg.ensemble();
    for (std::size_t k = 0; k < cfg.samples; ++k) {
      const PhasePoint z = sample_initial(ens, k);
      const Trajectory fwd = evolve_to_dispersal(z, 0.0, cfg.flow());
      const Trajectory bwd = evolve_to_dispersal(reverse(z), 0.0, cfg.flow());
      rep.merge(run_suite(fwd, bwd, tol));
    }
  }
  print_suite(log, rep);
  if (!cfg.out.empty()) {
    Output out(cfg.out);
    const json doc = {{"tool_version", kToolVersion}, {"config", cfg.to_json()}, {"report", to_json(rep)}};
    out.stream() << doc.dump(2) << '\n';
  }
  return rep.all_ok() ? kOk : kCheckFailure;
}

int run_ensemble(const RunConfig& cfg, std::ostream& log) {
  const InitialEnsemble ens = cfg.ensemble();
  EnsembleOptions opts;
  opts.threads = cfg.threads;
  opts.flow = cfg.flow();
  const auto outcomes = run_samples(ens, cfg.samples, opts);
  const MomentEstimate moments = estimate_moments(ens, cfg.samples);
  const EstimateReport rep = assemble_report(outcomes, moments, cfg.n, cfg.s_order, cfg.resolved_c_d());

  Output out(cfg.out);
  const json doc = {{"tool_version", kToolVersion}, {"config", cfg.to_json()}, {"report", to_json(rep)}};
  out.stream() << doc.dump(2) << '\n';
  if (const auto path = default_summary_path(cfg); !path.empty()) {
    Output summary(path);
    write_summary_csv(summary.stream(), outcomes);
  }

  log << "lhs=" << format_real(rep.lhs_estimate) << " rhs=" << format_real(rep.rhs_bound)
      << " ratio=" << format_real(rep.bound_ratio)
      << " stderr=" << (rep.lhs_stderr ? format_real(*rep.lhs_stderr) : std::string("n/a")) << '\n';
  if (!rep.lhs_stderr) {
    log << "single sample: no standard error, bound not asserted\n";
    return kOk;
  }
  log << (rep.bound_holds() ? "PASS" : "FAIL") << " spacetime-estimate\n";
  return rep.bound_holds() ? kOk : kCheckFailure;
}

int dispatch(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
    if (cfg.mode == "simulate") return run_simulate(cfg, log);
    if (cfg.mode == "verify") return run_verify(cfg, log);
    return run_ensemble(cfg, log);
  } catch (const PackingError& e) {
    log << "error: " << e.what() << '\n';
    return kPacking;
  } catch (const SchedulingError& e) {
    log << "error: " << e.what() << '\n';
    return kScheduling;
  } catch (const OverlapError& e) {
    log << "error: " << e.what() << '\n';
    return kScheduling;
  } catch (const FormatError& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int main_entry(int argc, char** argv, bool test_hooks) {
  CLI::App app{"Hard sphere dispersal simulator and virial-identity verifier"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "Flat key = value configuration file");
  app.require_subcommand(1);

  RunConfig cfg;
  double c_d = 0.0;
  double t_end = 0.0;
  bool until_dispersal = false;

  app.add_option("--n", cfg.n, "Number of spheres")->capture_default_str();
  app.add_option("--dim", cfg.dim, "Spatial dimension")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Ensemble seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Sampled initial states")->capture_default_str();
  app.add_option("--s-order", cfg.s_order, "Marginal order s")->capture_default_str();
  auto* c_d_opt = app.add_option("--c-d", c_d, "Bound constant (default 4N/(N-1))");
  app.add_option("--position-law", cfg.position_law, "uniform-ball | uniform-cube")->capture_default_str();
  app.add_option("--radius", cfg.radius, "Ball radius R or cube side L")->capture_default_str();
  app.add_option("--velocity-law", cfg.velocity_law, "uniform-ball | isotropic-gaussian")
      ->capture_default_str();
  app.add_option("--sigma", cfg.sigma, "Gaussian sigma or velocity ball radius")->capture_default_str();
  app.add_option("--drift", cfg.drift, "Radial drift added as drift * x")->capture_default_str();
  app.add_flag("--until-dispersal", until_dispersal, "Run until no collision remains (default)");
  auto* t_end_opt = app.add_option("--t-end", t_end, "Stop at this time instead of dispersal");
  app.add_option("--state", cfg.state_file, "Initial state JSON for simulate");
  app.add_option("--trajectory", cfg.trajectory_file, "Trajectory file to re-verify");
  app.add_option("--out", cfg.out, "Output file ('-' for stdout)");
  app.add_option("--summary", cfg.summary, "Per-trajectory CSV for ensemble");
  app.add_option("--threads", cfg.threads, "Ensemble worker threads (0 = all cores)");
  app.add_option("--max-time", cfg.max_time, "Dispersal horizon")->capture_default_str();
  app.add_option("--max-events", cfg.max_events, "Event budget")->capture_default_str();
  app.add_option("--tol-time", cfg.tol_time, "Simultaneity window")->capture_default_str();
  app.add_option("--identity-tol", cfg.identity_tol, "Illner residual tolerance")->capture_default_str();
  if (test_hooks) {
    app.add_flag("--fault-inject", cfg.fault_inject, "Corrupt the first collision (test builds)");
  }

  for (const char* name : {"simulate", "verify", "ensemble"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  cfg.mode = app.get_subcommands().front()->get_name();
  if (c_d_opt->count() > 0) cfg.c_d = c_d;
  if (t_end_opt->count() > 0) {
    if (until_dispersal) {
      std::cerr << "error: --t-end and --until-dispersal are exclusive\n";
      return kUsage;
    }
    cfg.t_end = t_end;
  }
  return dispatch(cfg, std::cerr);
}

}  // namespace hsvirial::cli
