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

#include "hsvirial/virial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hsvirial {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_window(const Trajectory& traj, double t) {
  if (!traj.covers(t)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside trajectory window [" +
                            std::to_string(traj.t0) + ", " + std::to_string(traj.final_time) + "]");
  }
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
}

void require_dispersed(const Trajectory& traj) {
  if (!traj.dispersed) {
    throw std::invalid_argument("total collision strength needs a dispersed trajectory");
  }
}

// 2 (lambda A + B / lambda)
double corollary_rhs(const PhasePoint& z, double lambda) {
  return 2.0 * (lambda * inertia(z) + energy(z) / lambda);
}

double r_bound_rhs(const PhasePoint& z, double lambda) {
  return 0.5 * (lambda * inertia(z) + energy(z) / lambda);
}

}  // namespace

BoundReport make_bound_report(double lhs, double rhs, double lambda) {
  BoundReport b;
  b.lhs = lhs;
  b.rhs = rhs;
  b.lambda = lambda;
  b.slack = rhs - lhs;
  b.satisfied = lhs <= rhs + 1e-9 * std::max(1.0, rhs);
  return b;
}

IdentityReport check_illner_identity(const Trajectory& traj, double t) {
  require_window(traj, t);
  IdentityReport rep;
  rep.r_start = virial(traj.initial, traj.t0);
  rep.r_end = virial(traj.state_at(t), t);
  rep.jump_sum = traj.jump_sum(t);
  rep.residual = rep.r_end - rep.r_start - rep.jump_sum;
  rep.max_rel_residual = std::abs(rep.residual) / (1.0 + std::abs(rep.r_start) + rep.jump_sum);
  return rep;
}

BoundReport check_inertia_lemma(const Trajectory& traj, double t) {
  require_window(traj, t);
  const double free_flight = inertia(advance_free(traj.initial, t - traj.t0));
  const double true_flow = inertia(traj.state_at(t));
  return make_bound_report(free_flight, true_flow, 0.0);
}

BoundReport check_r_bound(const Trajectory& traj, double t, double lambda) {
  require_lambda(lambda);
  require_window(traj, t);
  const double r = std::abs(virial(traj.state_at(t), t - traj.t0));
  return make_bound_report(r, r_bound_rhs(traj.initial, lambda), lambda);
}

BoundReport check_total_strength_bound(const Trajectory& traj, double lambda) {
  require_lambda(lambda);
  require_dispersed(traj);
  return make_bound_report(traj.jump_sum(), corollary_rhs(traj.initial, lambda), lambda);
}

BoundReport check_total_strength_bound(const Trajectory& forward, const Trajectory& backward,
                                       double lambda) {
  require_lambda(lambda);
  require_dispersed(forward);
  require_dispersed(backward);
  return make_bound_report(forward.jump_sum() + backward.jump_sum(),
                           corollary_rhs(forward.initial, lambda), lambda);
}

double optimal_lambda(const PhasePoint& state) {
  const double a = inertia(state);
  const double b = energy(state);
  if (a <= 0.0 || b <= 0.0) return 1.0;
  return std::sqrt(b / a);
}

std::vector<double> lambda_grid() {
  std::vector<double> grid;
  grid.reserve(61);
  for (int k = 0; k <= 60; ++k) grid.push_back(std::pow(10.0, -3.0 + 0.1 * k));
  return grid;
}

ConservationReport check_conservation(const Trajectory& traj) {
  ConservationReport rep;
  for (const auto& e : traj.events) {
    const double e_pre = norm2(e.v_i_pre) + norm2(e.v_j_pre);
    const double e_post = norm2(e.v_i_post) + norm2(e.v_j_post);
    const double speed = norm(e.v_i_pre) + norm(e.v_j_pre);
    const SpaceVec dp = (e.v_i_post + e.v_j_post) - (e.v_i_pre + e.v_j_pre);
    double dp_max = 0.0;
    for (double c : dp.components()) dp_max = std::max(dp_max, std::abs(c));
    if (e_pre > 0.0) rep.max_event_energy_rel = std::max(rep.max_event_energy_rel, std::abs(e_post - e_pre) / e_pre);
    if (speed > 0.0) rep.max_event_momentum_rel = std::max(rep.max_event_momentum_rel, dp_max / speed);
  }
  const double e0 = energy(traj.initial);
  const double e1 = energy(traj.final_state);
  if (e0 > 0.0) rep.energy_drift_rel = std::abs(e1 - e0) / e0;
  double speed_sum = 0.0;
  for (const auto& p : traj.initial.particles()) speed_sum += norm(p.v);
  if (speed_sum > 0.0) {
    rep.momentum_drift_rel = norm(momentum(traj.final_state) - momentum(traj.initial)) / speed_sum;
  }
  return rep;
}

SignReport check_jump_signs(const Trajectory& traj) {
  SignReport rep;
  rep.events = traj.events.size();
  rep.min_strength = kInf;
  rep.max_incoming_normal = -kInf;
  rep.min_outgoing_normal = kInf;
  for (const auto& e : traj.events) {
    const double in = dot(e.omega, e.v_j_pre - e.v_i_pre);
    const double out = dot(e.omega, e.v_j_post - e.v_i_post);
    rep.min_strength = std::min(rep.min_strength, e.strength);
    rep.max_incoming_normal = std::max(rep.max_incoming_normal, in);
    rep.min_outgoing_normal = std::min(rep.min_outgoing_normal, out);
    const double scale = std::max(1.0, norm(e.v_j_pre - e.v_i_pre));
    if (!(e.strength >= 0.0) || in > 0.0 || e.strength != std::abs(in) || out < -1e-12 * scale) {
      rep.ok = false;
    }
  }
  return rep;
}

void SuiteReport::merge(const SuiteReport& o) {
  trajectories += o.trajectories;
  events += o.events;
  max_identity_residual = std::max(max_identity_residual, o.max_identity_residual);
  min_strength = std::min(min_strength, o.min_strength);
  max_incoming_normal = std::max(max_incoming_normal, o.max_incoming_normal);
  max_event_energy_rel = std::max(max_event_energy_rel, o.max_event_energy_rel);
  max_event_momentum_rel = std::max(max_event_momentum_rel, o.max_event_momentum_rel);
  max_energy_drift = std::max(max_energy_drift, o.max_energy_drift);
  max_momentum_drift = std::max(max_momentum_drift, o.max_momentum_drift);
  min_inertia_slack = std::min(min_inertia_slack, o.min_inertia_slack);
  min_r_bound_slack = std::min(min_r_bound_slack, o.min_r_bound_slack);
  min_total_bound_slack = std::min(min_total_bound_slack, o.min_total_bound_slack);
  min_optimal_bound_slack = std::min(min_optimal_bound_slack, o.min_optimal_bound_slack);
  identity_ok = identity_ok && o.identity_ok;
  sign_ok = sign_ok && o.sign_ok;
  conservation_ok = conservation_ok && o.conservation_ok;
  inertia_ok = inertia_ok && o.inertia_ok;
  r_bound_ok = r_bound_ok && o.r_bound_ok;
  total_bound_ok = total_bound_ok && o.total_bound_ok;
  optimal_bound_ok = optimal_bound_ok && o.optimal_bound_ok;
}

std::vector<double> suite_sample_times(const Trajectory& traj, std::size_t count) {
  const double span = traj.final_time - traj.t0;
  const double end = traj.dispersed ? traj.t0 + 1.5 * span + 1.0 : traj.final_time;
  std::vector<double> times;
  times.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double f = count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.0;
    times.push_back(std::min(end, traj.t0 + f * (end - traj.t0)));
  }
  return times;
}

namespace {

void check_trajectory(const Trajectory& traj, const std::vector<double>& lambdas,
                      const SuiteTolerances& tol, SuiteReport& rep) {
  rep.trajectories += 1;
  rep.events += traj.events.size();
  const double r_start = virial(traj.initial, traj.t0);
  for (double t : suite_sample_times(traj, tol.sample_times)) {
    const PhasePoint z = traj.state_at(t);
    const double jumps = traj.jump_sum(t);
    const double residual =
        std::abs(virial(z, t) - r_start - jumps) / (1.0 + std::abs(r_start) + jumps);
    rep.max_identity_residual = std::max(rep.max_identity_residual, residual);

    const BoundReport inertia_check =
        make_bound_report(inertia(advance_free(traj.initial, t - traj.t0)), inertia(z), 0.0);
    rep.min_inertia_slack = std::min(rep.min_inertia_slack, inertia_check.slack);
    rep.inertia_ok = rep.inertia_ok && inertia_check.satisfied;

    const double r_abs = std::abs(virial(z, t - traj.t0));
    for (double lambda : lambdas) {
      const BoundReport b = make_bound_report(r_abs, r_bound_rhs(traj.initial, lambda), lambda);
      rep.min_r_bound_slack = std::min(rep.min_r_bound_slack, b.slack);
      rep.r_bound_ok = rep.r_bound_ok && b.satisfied;
    }
  }
  rep.identity_ok = rep.identity_ok && rep.max_identity_residual <= tol.identity_rel;

  const SignReport signs = check_jump_signs(traj);
  if (signs.events > 0) {
    rep.min_strength = std::min(rep.min_strength, signs.min_strength);
    rep.max_incoming_normal = std::max(rep.max_incoming_normal, signs.max_incoming_normal);
  }
  rep.sign_ok = rep.sign_ok && signs.ok;

  const ConservationReport cons = check_conservation(traj);
  rep.max_event_energy_rel = std::max(rep.max_event_energy_rel, cons.max_event_energy_rel);
  rep.max_event_momentum_rel = std::max(rep.max_event_momentum_rel, cons.max_event_momentum_rel);
  rep.max_energy_drift = std::max(rep.max_energy_drift, cons.energy_drift_rel);
  rep.max_momentum_drift = std::max(rep.max_momentum_drift, cons.momentum_drift_rel);
  rep.conservation_ok = rep.conservation_ok &&
                        rep.max_event_energy_rel <= tol.event_conservation_rel &&
                        rep.max_event_momentum_rel <= tol.event_conservation_rel &&
                        rep.max_energy_drift <= tol.drift_rel &&
                        rep.max_momentum_drift <= tol.drift_rel;
}

void check_totals(double total, const PhasePoint& z, const std::vector<double>& lambdas,
                  SuiteReport& rep) {
  for (double lambda : lambdas) {
    const BoundReport b = make_bound_report(total, corollary_rhs(z, lambda), lambda);
    rep.min_total_bound_slack = std::min(rep.min_total_bound_slack, b.slack);
    rep.total_bound_ok = rep.total_bound_ok && b.satisfied;
  }
  const double optimal_rhs = 4.0 * std::sqrt(inertia(z)) * std::sqrt(energy(z));
  const double slack = optimal_rhs - total;
  rep.min_optimal_bound_slack = std::min(rep.min_optimal_bound_slack, slack);
  // with no collisions at all the bound is met trivially, even when I or E vanishes
  rep.optimal_bound_ok = rep.optimal_bound_ok && (slack > 0.0 || total == 0.0);
}

std::vector<double> suite_lambdas(const PhasePoint& z) {
  std::vector<double> lambdas = lambda_grid();
  lambdas.push_back(optimal_lambda(z));
  return lambdas;
}

}  // namespace

SuiteReport run_suite(const Trajectory& forward, const Trajectory& backward,
                      const SuiteTolerances& tol) {
  require_dispersed(forward);
  require_dispersed(backward);
  SuiteReport rep;
  const auto lambdas = suite_lambdas(forward.initial);
  check_trajectory(forward, lambdas, tol, rep);
  check_trajectory(backward, lambdas, tol, rep);
  check_totals(forward.jump_sum() + backward.jump_sum(), forward.initial, lambdas, rep);
  return rep;
}

SuiteReport run_suite(const Trajectory& traj, const SuiteTolerances& tol) {
  SuiteReport rep;
  const auto lambdas = suite_lambdas(traj.initial);
  check_trajectory(traj, lambdas, tol, rep);
  if (traj.dispersed) check_totals(traj.jump_sum(), traj.initial, lambdas, rep);
  return rep;
}

}  // namespace hsvirial
