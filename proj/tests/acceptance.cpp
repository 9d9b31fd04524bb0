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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hsvirial/ensemble.hpp"
#include "hsvirial/flow.hpp"
#include "hsvirial/io.hpp"
#include "hsvirial/virial.hpp"
#include "oracles.hpp"

namespace {

using namespace hsvirial;

int failures = 0;
std::map<int, std::string> lines;  // printed in criterion order at the end

void report(int id, const char* name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  lines[id] = fmt::format("{} C{:<2} {:<24} {}", ok ? "PASS" : "FAIL", id, name, detail);
}

struct Realization {
  Trajectory forward;
  Trajectory backward;
};

// N in {2,5,10,20} x d in {2,3}, 125 draws each: 1000 initial states,
// each run to dispersal forward and backward in time.
std::vector<PhasePoint> suite_states() {
  std::vector<PhasePoint> states;
  std::uint64_t seed = 1000;
  for (std::size_t n : {2, 5, 10, 20}) {
    for (int d : {2, 3}) {
      InitialEnsemble ens;
      ens.n = n;
      ens.dim = d;
      ens.position_scale = 15.0;
      ens.velocity_law = VelocityLaw::IsotropicGaussian;
      ens.velocity_scale = 1.0;
      ens.seed = seed++;
      for (std::uint64_t k = 0; k < 125; ++k) states.push_back(sample_initial(ens, k));
    }
  }
  return states;
}

std::vector<Realization> realize(const std::vector<PhasePoint>& states, const FlowOptions& opts) {
  std::vector<Realization> out;
  out.reserve(states.size());
  for (const auto& z : states) {
    out.push_back({evolve_to_dispersal(z, 0.0, opts), evolve_to_dispersal(reverse(z), 0.0, opts)});
  }
  return out;
}

SuiteReport suite_report(const std::vector<Realization>& rs) {
  SuiteReport all;
  for (const auto& r : rs) all.merge(run_suite(r.forward, r.backward));
  return all;
}

// Dense inward-moving lattices: many collisions per trajectory.
std::vector<Trajectory> dense_trajectories(std::size_t min_events, const FlowOptions& opts) {
  std::mt19937_64 rng(777);
  std::vector<Trajectory> out;
  std::size_t events = 0;
  for (int k = 0; events < min_events && k < 1000; ++k) {
    const int dim = 2 + k % 2;
    const int side = dim == 2 ? 12 : 5;
    const PhasePoint z = oracle::converging_lattice(rng, side, dim, 1.3, 0.5, 0.3);
    out.push_back(evolve_to_dispersal(z, 0.0, opts));
    events += out.back().events.size();
  }
  return out;
}

void criteria_suite() {
  const auto states = suite_states();
  const auto rs = realize(states, {});
  const SuiteReport rep = suite_report(rs);

  report(1, "illner-identity", rep.identity_ok && rep.trajectories == 2000,
         fmt::format("trajectories={} events={} max_rel_residual={:.3e} (tol 1e-8)", rep.trajectories,
                     rep.events, rep.max_identity_residual));

  report(2, "jump-sign", rep.sign_ok && rep.min_strength >= 0.0 && rep.events > 0,
         fmt::format("events={} min_strength={:.6g} max_incoming_normal={:.3e}", rep.events,
                     rep.min_strength, rep.max_incoming_normal));

  // conservation over the suite plus dense clusters
  std::size_t events = rep.events;
  SuiteReport cons = rep;
  const auto dense = dense_trajectories(100'000, {});
  for (const auto& t : dense) {
    events += t.events.size();
    const ConservationReport c = check_conservation(t);
    cons.max_event_energy_rel = std::max(cons.max_event_energy_rel, c.max_event_energy_rel);
    cons.max_event_momentum_rel = std::max(cons.max_event_momentum_rel, c.max_event_momentum_rel);
    cons.max_energy_drift = std::max(cons.max_energy_drift, c.energy_drift_rel);
    cons.max_momentum_drift = std::max(cons.max_momentum_drift, c.momentum_drift_rel);
  }
  const bool cons_ok = events >= 100'000 && cons.max_event_energy_rel <= 1e-12 &&
                       cons.max_event_momentum_rel <= 1e-12 && cons.max_energy_drift <= 1e-9 &&
                       cons.max_momentum_drift <= 1e-9;
  report(3, "conservation", cons_ok,
         fmt::format("events={} event_energy={:.2e} event_momentum={:.2e} drift_energy={:.2e} "
                     "drift_momentum={:.2e}",
                     events, cons.max_event_energy_rel, cons.max_event_momentum_rel,
                     cons.max_energy_drift, cons.max_momentum_drift));

  // inertia lemma; exact equality when nothing collides
  std::size_t free_checked = 0;
  bool free_exact = true;
  for (const auto& r : rs) {
    for (const Trajectory* t : {&r.forward, &r.backward}) {
      if (!t->events.empty()) continue;
      for (double s : suite_sample_times(*t, 20)) {
        const BoundReport b = check_inertia_lemma(*t, s);
        free_exact = free_exact && b.lhs == b.rhs;
        ++free_checked;
      }
    }
  }
  report(5, "inertia-lemma", rep.inertia_ok && free_exact && free_checked > 0,
         fmt::format("min_slack={:.3e} collision_free_points={} exact={}", rep.min_inertia_slack,
                     free_checked, free_exact));

  report(6, "r-and-total-bounds",
         rep.r_bound_ok && rep.total_bound_ok && rep.optimal_bound_ok && rep.min_optimal_bound_slack > 0.0,
         fmt::format("lambdas=61+opt min_r_slack={:.3e} min_total_slack={:.3e} min_opt_slack={:.3e}",
                     rep.min_r_bound_slack, rep.min_total_bound_slack, rep.min_optimal_bound_slack));

  // the same suite with the first collision of every run corrupted
  FlowOptions faulty;
  faulty.fault_inject = true;
  const SuiteReport bad = suite_report(realize(states, faulty));
  SuiteReport bad_dense;
  for (const auto& t : dense_trajectories(100'000, faulty)) bad_dense.merge(run_suite(t));
  const bool c1_fails = !bad.identity_ok;
  const bool c3_fails = !bad.conservation_ok && !bad_dense.conservation_ok;
  report(10, "fault-detection", c1_fails && c3_fails,
         fmt::format("identity_fails={} (residual {:.3e}) conservation_fails={} (event_momentum {:.3e})",
                     c1_fails, bad.max_identity_residual, c3_fails, bad.max_event_momentum_rel));
}

void criterion_reversibility() {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst_inv = 0.0;
  for (int k = 0; k < 100'000; ++k) {
    const int d = 2 + k % 2;
    SpaceVec w(d), vp(d), vq(d);
    for (int c = 0; c < d; ++c) {
      w[c] = g(rng);
      vp[c] = g(rng);
      vq[c] = g(rng);
    }
    w *= 1.0 / norm(w);
    const auto [a, b] = collision_transform(w, vp, vq);
    const auto [p, q] = collision_transform(w, a, b);
    const double scale = std::max({1.0, norm(vp), norm(vq)});
    worst_inv = std::max({worst_inv, norm(p - vp) / scale, norm(q - vq) / scale});
  }

  double worst_trip = 0.0;
  std::size_t tested = 0;
  std::size_t with_events = 0;
  for (std::size_t n = 2; n <= 10; ++n) {
    InitialEnsemble ens;
    ens.n = n;
    ens.dim = 2 + static_cast<int>(n % 2);
    ens.position_scale = 4.0;
    ens.velocity_law = VelocityLaw::IsotropicGaussian;
    ens.seed = 40 + n;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const PhasePoint z = sample_initial(ens, k);
      const Trajectory fwd = evolve_to_dispersal(z, 0.0);
      if (fwd.events.size() > 100) continue;
      const double horizon = fwd.final_time + 1.0;
      const Trajectory back = evolve(reverse(fwd.state_at(horizon)), 0.0, horizon);
      const PhasePoint target = reverse(z);
      double scale = 1.0;
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        scale = std::max({scale, norm(z[i].x), norm(z[i].v)});
        diff = std::max({diff, norm(back.final_state[i].x - target[i].x),
                         norm(back.final_state[i].v - target[i].v)});
      }
      worst_trip = std::max(worst_trip, diff / scale);
      ++tested;
      if (!fwd.events.empty()) ++with_events;
    }
  }
  report(4, "involution-reversal", worst_inv <= 1e-14 && worst_trip <= 1e-7 && with_events > 100,
         fmt::format("involution_max={:.2e} (tol 1e-14) round_trip_max={:.2e} (tol 1e-7) runs={} "
                     "with_events={}",
                     worst_inv, worst_trip, tested, with_events));
}

void criterion_two_body() {
  const Particle p{{0, 0}, {1, 0}};
  const auto t_head = predict_pair_collision(p, {{3, 0}, {-1, 0}}, 0.0);
  const auto t_off = predict_pair_collision(p, {{3, 0.6}, {-1, 0}}, 0.0);
  const bool times = t_head && t_off && std::abs(*t_head - 1.0) <= 1e-12 && std::abs(*t_off - 1.1) <= 1e-12;

  const auto [a, b] = apply_collision({{1, 0}, {1, 0}}, {{2, 0}, {-1, 0}});
  const double exch = std::max(norm(a.v - SpaceVec{-1, 0}), norm(b.v - SpaceVec{1, 0}));

  const PhasePoint z(2, {p, {{3, 0}, {-1, 0}}});
  const IdentityReport id = check_illner_identity(evolve(z, 0.0, 2.0), 2.0);
  const bool ledger = std::abs(id.r_start + 3.0) <= 1e-12 && std::abs(id.r_end + 1.0) <= 1e-12 &&
                      std::abs(id.jump_sum - 2.0) <= 1e-12;

  report(7, "two-body-closed-form", times && exch <= 1e-14 && ledger,
         fmt::format("t_head={:.17g} t_offset={:.17g} exchange_err={:.1e} r: {:.17g} -> {:.17g} jump={:.17g}",
                     t_head.value_or(NAN), t_off.value_or(NAN), exch, id.r_start, id.r_end, id.jump_sum));
}

void criterion_spacetime() {
  bool ok = true;
  std::string detail;
  for (VelocityLaw law : {VelocityLaw::UniformBall, VelocityLaw::IsotropicGaussian}) {
    InitialEnsemble ens;
    ens.n = 20;
    ens.dim = 2;
    ens.position_scale = 15.0;
    ens.velocity_law = law;
    ens.velocity_scale = 1.0;
    ens.seed = 20260;
    // a pair with tiny relative speed can take longer than the default
    // horizon to meet; dispersal must still be reached
    EnsembleOptions opts;
    opts.flow.max_time = 1e9;
    const auto outcomes = run_samples(ens, 10'000, opts);
    const MomentEstimate m = estimate_moments(ens, 10'000);
    for (std::size_t s : {2, 3, 5}) {
      const EstimateReport r = assemble_report(outcomes, m, 20, s, default_c_d(20));
      const double margin = r.bound_ratio + 3.0 * *r.lhs_stderr / r.rhs_bound;
      ok = ok && margin < 1.0 && r.estimators_agree();
      detail += fmt::format("{}/s={}: ratio+3se={:.4f} agree={} ", to_string(law), s, margin,
                            r.estimators_agree());
    }
  }
  report(8, "spacetime-estimate", ok, detail);
}

void criterion_determinism() {
  InitialEnsemble ens;
  ens.n = 20;
  ens.dim = 2;
  ens.position_scale = 8.0;
  ens.velocity_law = VelocityLaw::IsotropicGaussian;
  ens.seed = 9;
  const nlohmann::json cfg = {{"seed", ens.seed}};

  bool same_logs = true;
  for (std::uint64_t k = 0; k < 20; ++k) {
    std::ostringstream a, b;
    write_trajectory(a, evolve_to_dispersal(sample_initial(ens, k), 0.0), cfg);
    write_trajectory(b, evolve_to_dispersal(sample_initial(ens, k), 0.0), cfg);
    same_logs = same_logs && a.str() == b.str();
  }

  auto ensemble_text = [&](unsigned threads) {
    EnsembleOptions opts;
    opts.threads = threads;
    const auto outcomes = run_samples(ens, 500, opts);
    const auto rep = assemble_report(outcomes, estimate_moments(ens, 500), ens.n, 3, default_c_d(ens.n));
    std::ostringstream os;
    os << to_json(rep).dump(2) << '\n';
    write_summary_csv(os, outcomes);
    return os.str();
  };
  const std::string r1 = ensemble_text(1);
  const bool same_reports = r1 == ensemble_text(1) && r1 == ensemble_text(4);
  report(9, "determinism", same_logs && same_reports,
         fmt::format("event_logs_identical={} reports_identical={} (threads 1 vs 4)", same_logs,
                     same_reports));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  try {
    criteria_suite();
    criterion_reversibility();
    criterion_two_body();
    criterion_spacetime();
    criterion_determinism();
  } catch (const std::exception& e) {
    for (const auto& [id, line] : lines) fmt::print("{}\n", line);
    fmt::print("FAIL acceptance aborted: {}\n", e.what());
    return 1;
  }
  for (const auto& [id, line] : lines) fmt::print("{}\n", line);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} failed, {:.1f} s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
