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

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hsvirial/flow.hpp"
#include "hsvirial/phase.hpp"

namespace hsvirial {

/// Illner ledger at one time: r(t) - r(t0) against the accumulated jumps.
struct IdentityReport {
  double r_start = 0.0;
  double r_end = 0.0;
  double jump_sum = 0.0;
  double residual = 0.0;
  /// |residual| / (1 + |r_start| + jump_sum)
  double max_rel_residual = 0.0;
};

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double lambda = 0.0;
  bool satisfied = false;
  double slack = 0.0;  ///< rhs - lhs
};

/// lhs <= rhs + 1e-9 max(1, rhs)
BoundReport make_bound_report(double lhs, double rhs, double lambda);

IdentityReport check_illner_identity(const Trajectory& traj, double t);

/// Free-flight inertia I_N(X + V(t - t0)) (lhs) against the true flow (rhs).
BoundReport check_inertia_lemma(const Trajectory& traj, double t);

/// |r_N(psi^tau Z, tau)| against (lambda I_N(Z) + energy(Z) / lambda) / 2,
/// with tau = t - t0 measured from the initial data.
BoundReport check_r_bound(const Trajectory& traj, double t, double lambda);

/// Total collision strength against 2 (lambda I_N(Z) + energy(Z) / lambda).
/// One-sided: only the forward collisions of a dispersed trajectory.
BoundReport check_total_strength_bound(const Trajectory& traj, double lambda);

/// Two-sided form: `backward` is the dispersal run of reverse(Z) and
/// supplies the collisions at negative times.
BoundReport check_total_strength_bound(const Trajectory& forward, const Trajectory& backward,
                                       double lambda);

/// sqrt(energy / I_N); minimizes the corollary's right-hand side.
/// Returns 1 when either moment vanishes.
double optimal_lambda(const PhasePoint& state);

/// 61 log-spaced values covering [1e-3, 1e3].
std::vector<double> lambda_grid();

// --- Suite over a (forward, backward) pair of dispersed trajectories ---

struct ConservationReport {
  double max_event_energy_rel = 0.0;
  double max_event_momentum_rel = 0.0;
  double energy_drift_rel = 0.0;
  double momentum_drift_rel = 0.0;
};

/// Per-event and whole-trajectory conservation residuals.
ConservationReport check_conservation(const Trajectory& traj);

struct SignReport {
  std::size_t events = 0;
  double min_strength = 0.0;
  /// Largest omega . (v_j_pre - v_i_pre); must be <= 0.
  double max_incoming_normal = 0.0;
  /// Smallest omega . (v_j_post - v_i_post); must be >= 0.
  double min_outgoing_normal = 0.0;
  bool ok = true;
};

SignReport check_jump_signs(const Trajectory& traj);

struct SuiteTolerances {
  double identity_rel = 1e-8;
  double event_conservation_rel = 1e-12;
  double drift_rel = 1e-9;
  std::size_t sample_times = 20;
};

struct SuiteReport {
  std::size_t trajectories = 0;
  std::size_t events = 0;
  double max_identity_residual = 0.0;
  double min_strength = std::numeric_limits<double>::infinity();
  double max_incoming_normal = -std::numeric_limits<double>::infinity();
  double max_event_energy_rel = 0.0;
  double max_event_momentum_rel = 0.0;
  double max_energy_drift = 0.0;
  double max_momentum_drift = 0.0;
  double min_inertia_slack = std::numeric_limits<double>::infinity();
  double min_r_bound_slack = std::numeric_limits<double>::infinity();
  double min_total_bound_slack = std::numeric_limits<double>::infinity();
  double min_optimal_bound_slack = std::numeric_limits<double>::infinity();
  bool identity_ok = true;
  bool sign_ok = true;
  bool conservation_ok = true;
  bool inertia_ok = true;
  bool r_bound_ok = true;
  bool total_bound_ok = true;
  bool optimal_bound_ok = true;

  bool all_ok() const {
    return identity_ok && sign_ok && conservation_ok && inertia_ok && r_bound_ok &&
           total_bound_ok && optimal_bound_ok;
  }
  /// Fold another report into this one.
  void merge(const SuiteReport& other);
};

/// Times at which the suite samples a trajectory: evenly spaced over
/// [t0, t0 + 1.5 (final_time - t0) + 1].
std::vector<double> suite_sample_times(const Trajectory& traj, std::size_t count);

/// Runs every check on one two-sided realization. Both trajectories must
/// be dispersed, with backward.initial == reverse(forward.initial).
SuiteReport run_suite(const Trajectory& forward, const Trajectory& backward,
                      const SuiteTolerances& tol = {});

/// One-sided variant for a single trajectory; the total-strength bounds
/// are checked on the forward collisions only, and only when dispersed.
SuiteReport run_suite(const Trajectory& traj, const SuiteTolerances& tol = {});

}  // namespace hsvirial
