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
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hsvirial/phase.hpp"

namespace hsvirial {

/// One binary elastic collision. Indices are 0-based; i < j.
struct CollisionEvent {
  double time = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  SpaceVec omega;  ///< unit normal x_j - x_i at contact
  SpaceVec v_i_pre;
  SpaceVec v_j_pre;
  SpaceVec v_i_post;
  SpaceVec v_j_post;
  double strength = 0.0;  ///< |omega . (v_j_pre - v_i_pre)|

  friend bool operator==(const CollisionEvent&, const CollisionEvent&) = default;
};

/// A simulated window of the hard sphere flow. The initial state and the
/// event log determine the state at every time in the window, see state_at().
struct Trajectory {
  PhasePoint initial;
  double t0 = 0.0;
  std::vector<CollisionEvent> events;
  double final_time = 0.0;
  PhasePoint final_state;
  /// No pair collides after final_time. The window then extends to +inf.
  bool dispersed = false;

  bool covers(double t) const { return t >= t0 && (dispersed || t <= final_time); }

  /// Replays free flight and the recorded collisions up to time t.
  /// Bit-identical to the simulator's own state at every event time.
  PhasePoint state_at(double t) const;

  /// Sum of event strengths for events with time <= t.
  double jump_sum(double t) const;
  double jump_sum() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct FlowOptions {
  std::uint64_t max_events = 10'000'000;
  /// Horizon for evolve_to_dispersal, measured from t0.
  double max_time = 1e4;
  /// Events closer than this sharing a particle abort as a multiple collision.
  double tol_time = 1e-12;
  /// Test hook: corrupt the first collision of each evolution by negating
  /// one post-collision velocity component. Only for checking the checkers.
  bool fault_inject = false;
};

/// Absolute time of the next contact of p and q, both given at time `now`.
/// Empty if they never come within distance 1 while approaching.
/// Throws OverlapError if the pair overlaps beyond kTolOverlap.
std::optional<double> predict_pair_collision(const Particle& p, const Particle& q, double now);

/// Elastic collision law for contact normal omega (pointing from p to q).
/// Pure velocity map; an involution for fixed omega.
std::pair<SpaceVec, SpaceVec> collision_transform(const SpaceVec& omega, const SpaceVec& vp,
                                                  const SpaceVec& vq);

/// Collision of two spheres at contact. Positions are unchanged.
/// Throws std::invalid_argument if the pair is not at contact (within
/// kTolContact) or is separating.
std::pair<Particle, Particle> apply_collision(const Particle& p, const Particle& q);

/// x_i += v_i dt for every particle.
PhasePoint advance_free(const PhasePoint& state, double dt);

/// Negates all velocities.
PhasePoint reverse(const PhasePoint& state);

/// Flow from t0 to t1 >= t0.
Trajectory evolve(const PhasePoint& state, double t0, double t1, const FlowOptions& opts = {});

/// Flow from t0 until no further collision is possible. final_time is the
/// time of the last collision (t0 if there is none).
Trajectory evolve_to_dispersal(const PhasePoint& state, double t0, const FlowOptions& opts = {});

}  // namespace hsvirial
