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

#include "hsvirial/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hsvirial/error.hpp"

namespace hsvirial {

namespace {

// Shared by the simulator and Trajectory::state_at so that replay
// reproduces the simulated states bit for bit.
void advance_particles(std::vector<Particle>& ps, double dt) {
  for (auto& p : ps) p.x += p.v * dt;
}

// Moves the pair symmetrically along the line of centers to distance
// exactly 1 and returns the unit contact normal.
SpaceVec settle_contact(std::vector<Particle>& ps, std::size_t i, std::size_t j) {
  const SpaceVec dx = ps[j].x - ps[i].x;
  const double d = norm(dx);
  const SpaceVec omega = dx * (1.0 / d);
  const double half_gap = 0.5 * (1.0 - d);
  ps[i].x -= omega * half_gap;
  ps[j].x += omega * half_gap;
  return omega;
}

// Normal relative velocity omega . (v_q - v_p) at contact, with omega
// computed exactly as settle_contact() computes it.
double contact_normal_velocity(const Particle& p, const Particle& q) {
  const SpaceVec dx = q.x - p.x;
  const SpaceVec omega = dx * (1.0 / norm(dx));
  return dot(omega, q.v - p.v);
}

// Negates the post-collision velocity component that leaves the pair most
// clearly separating, so the corrupted run still schedules cleanly.
void inject_fault(const SpaceVec& omega, SpaceVec& vi, SpaceVec& vj) {
  const double normal = dot(omega, vj - vi);
  double best = -std::numeric_limits<double>::infinity();
  int best_k = 0;
  bool on_i = true;
  for (int k = 0; k < omega.dim(); ++k) {
    const double via_i = normal + 2.0 * omega[k] * vi[k];
    const double via_j = normal - 2.0 * omega[k] * vj[k];
    if (via_i > best && vi[k] != 0.0) {
      best = via_i;
      best_k = k;
      on_i = true;
    }
    if (via_j > best && vj[k] != 0.0) {
      best = via_j;
      best_k = k;
      on_i = false;
    }
  }
  if (on_i) {
    vi[best_k] = -vi[best_k];
  } else {
    vj[best_k] = -vj[best_k];
  }
}

struct Pending {
  double time;
  std::uint32_t i;
  std::uint32_t j;
  std::uint64_t stamp_i;
  std::uint64_t stamp_j;
};

// Heap ordering: earliest time first, then lexicographic pair.
struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.i != b.i) return a.i > b.i;
    return a.j > b.j;
  }
};

class Scheduler {
 public:
  Scheduler(const PhasePoint& state, double t0, const FlowOptions& opts)
      : dim_(state.dim()),
        ps_(state.particles()),
        now_(t0),
        t0_(t0),
        stamps_(state.size(), 0),
        opts_(opts) {
    if (!state.is_admissible()) {
      throw OverlapError("initial state overlaps: min pair distance " +
                         std::to_string(state.min_pair_distance()));
    }
    for (std::size_t i = 0; i < ps_.size(); ++i) {
      for (std::size_t j = i + 1; j < ps_.size(); ++j) push_prediction(i, j);
    }
  }

  // Processes events up to `until` (inclusive). Returns true if the queue
  // ran dry, i.e. the configuration has dispersed.
  bool run(std::optional<double> until) {
    while (true) {
      drop_stale();
      if (heap_.empty()) return true;
      const Pending next = heap_.front();
      if (until && next.time > *until) return false;
      if (!until && next.time - t0_ > opts_.max_time) {
        throw DispersalTimeoutError("no dispersal within max_time " + std::to_string(opts_.max_time) +
                                    " after " + std::to_string(events_.size()) + " events");
      }
      if (events_.size() >= opts_.max_events) {
        throw EventLimitError("exceeded max_events " + std::to_string(opts_.max_events));
      }
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      heap_.pop_back();
      check_simultaneous(next);
      process(next);
    }
  }

  void advance_to(double t) {
    advance_particles(ps_, t - now_);
    now_ = t;
  }

  PhasePoint state() const { return PhasePoint(dim_, ps_); }
  double now() const { return now_; }
  std::vector<CollisionEvent>& events() { return events_; }

 private:
  bool valid(const Pending& e) const {
    return stamps_[e.i] == e.stamp_i && stamps_[e.j] == e.stamp_j;
  }

  void drop_stale() {
    while (!heap_.empty() && !valid(heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      heap_.pop_back();
    }
    const std::size_t n = ps_.size();
    if (heap_.size() > 8 * n * n + 4096) {
      std::erase_if(heap_, [this](const Pending& e) { return !valid(e); });
      std::make_heap(heap_.begin(), heap_.end(), Later{});
    }
  }

  std::optional<double> push_prediction(std::size_t a, std::size_t b) {
    const std::size_t i = std::min(a, b);
    const std::size_t j = std::max(a, b);
    const auto t = predict_pair_collision(ps_[i], ps_[j], now_);
    if (t) {
      heap_.push_back({*t, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), stamps_[i],
                       stamps_[j]});
      std::push_heap(heap_.begin(), heap_.end(), Later{});
    }
    return t;
  }

  // Any other pending contact within tol_time that shares a sphere with
  // `e` means three or more spheres meet at once.
  void check_simultaneous(const Pending& e) {
    std::vector<Pending> held;
    while (!heap_.empty() && heap_.front().time <= e.time + opts_.tol_time) {
      const Pending other = heap_.front();
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      heap_.pop_back();
      if (!valid(other)) continue;
      if (other.i == e.i || other.i == e.j || other.j == e.i || other.j == e.j) {
        throw_multiple(e.time, {e.i, e.j, other.i, other.j});
      }
      held.push_back(other);
    }
    for (const auto& h : held) {
      heap_.push_back(h);
      std::push_heap(heap_.begin(), heap_.end(), Later{});
    }
  }

  [[noreturn]] static void throw_multiple(double t, std::initializer_list<std::uint32_t> ids) {
    std::string who;
    for (auto id : ids) who += " " + std::to_string(id + 1);
    throw MultipleCollisionError("multiple collision near t=" + std::to_string(t) +
                                 " involving particles" + who);
  }

  void process(const Pending& e) {
    const std::size_t i = e.i;
    const std::size_t j = e.j;
    // Grazing contacts can round to a separating normal velocity; the pair
    // then misses, nothing is recorded and nothing moves.
    const double dt = e.time - now_;
    const Particle pi{ps_[i].x + ps_[i].v * dt, ps_[i].v};
    const Particle pj{ps_[j].x + ps_[j].v * dt, ps_[j].v};
    if (contact_normal_velocity(pi, pj) >= 0.0) return;
    advance_to(e.time);
    const SpaceVec omega = settle_contact(ps_, i, j);
    CollisionEvent ev;
    ev.time = e.time;
    ev.i = i;
    ev.j = j;
    ev.omega = omega;
    ev.v_i_pre = ps_[i].v;
    ev.v_j_pre = ps_[j].v;
    ev.strength = std::abs(dot(omega, ev.v_j_pre - ev.v_i_pre));
    auto [vi, vj] = collision_transform(omega, ev.v_i_pre, ev.v_j_pre);
    if (opts_.fault_inject && events_.empty()) inject_fault(omega, vi, vj);
    ev.v_i_post = vi;
    ev.v_j_post = vj;
    ps_[i].v = vi;
    ps_[j].v = vj;
    events_.push_back(std::move(ev));
    ++stamps_[i];
    ++stamps_[j];
    repredict(i, j, e.time);
  }

  void repredict(std::size_t i, std::size_t j, double t) {
    for (std::size_t k = 0; k < ps_.size(); ++k) {
      // the collided pair itself separates and cannot meet again before
      // one of them is restamped by another collision
      if (k == i || k == j) continue;
      for (std::size_t a : {i, j}) {
        const auto next = push_prediction(a, k);
        if (next && *next <= t + opts_.tol_time) {
          throw_multiple(t, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             static_cast<std::uint32_t>(k)});
        }
      }
    }
  }

  int dim_;
  std::vector<Particle> ps_;
  double now_;
  double t0_;
  std::vector<std::uint64_t> stamps_;
  std::vector<Pending> heap_;
  std::vector<CollisionEvent> events_;
  FlowOptions opts_;
};

}  // namespace

PhasePoint Trajectory::state_at(double t) const {
  if (!covers(t)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside trajectory window");
  }
  std::vector<Particle> ps = initial.particles();
  double now = t0;
  for (const auto& e : events) {
    if (e.time > t) break;
    advance_particles(ps, e.time - now);
    now = e.time;
    settle_contact(ps, e.i, e.j);
    ps[e.i].v = e.v_i_post;
    ps[e.j].v = e.v_j_post;
  }
  advance_particles(ps, t - now);
  return PhasePoint(initial.dim(), std::move(ps));
}

double Trajectory::jump_sum(double t) const {
  double s = 0.0;
  for (const auto& e : events) {
    if (e.time > t) break;
    s += e.strength;
  }
  return s;
}

double Trajectory::jump_sum() const {
  double s = 0.0;
  for (const auto& e : events) s += e.strength;
  return s;
}

std::optional<double> predict_pair_collision(const Particle& p, const Particle& q, double now) {
  const SpaceVec dx = q.x - p.x;
  const double dist2 = norm2(dx);
  if (dist2 < (1.0 - kTolOverlap) * (1.0 - kTolOverlap)) {
    throw OverlapError("pair overlaps: distance " + std::to_string(std::sqrt(dist2)));
  }
  const SpaceVec dv = q.v - p.v;
  const double b = dot(dx, dv);
  if (b >= 0.0) return std::nullopt;
  const double c = dist2 - 1.0;
  if (c <= 0.0) return now;  // touching and approaching
  const double a = norm2(dv);
  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  // smaller root (-b - sqrt(disc)) / a, written without cancellation
  const double tau = c / (-b + std::sqrt(disc));
  return now + tau;
}

std::pair<SpaceVec, SpaceVec> collision_transform(const SpaceVec& omega, const SpaceVec& vp,
                                                  const SpaceVec& vq) {
  const double n = dot(omega, vq - vp);
  return {vp + omega * n, vq - omega * n};
}

std::pair<Particle, Particle> apply_collision(const Particle& p, const Particle& q) {
  const SpaceVec dx = q.x - p.x;
  const double d = norm(dx);
  if (std::abs(d - 1.0) > kTolContact) {
    throw std::invalid_argument("apply_collision: pair not at contact (distance " +
                                std::to_string(d) + ")");
  }
  const SpaceVec omega = dx * (1.0 / d);
  const SpaceVec dv = q.v - p.v;
  if (dot(omega, dv) > 1e-12 * (1.0 + norm(dv))) {
    throw std::invalid_argument("apply_collision: pair is separating");
  }
  auto [vp, vq] = collision_transform(omega, p.v, q.v);
  return {Particle{p.x, vp}, Particle{q.x, vq}};
}

PhasePoint advance_free(const PhasePoint& state, double dt) {
  std::vector<Particle> ps = state.particles();
  advance_particles(ps, dt);
  return PhasePoint(state.dim(), std::move(ps));
}

PhasePoint reverse(const PhasePoint& state) {
  std::vector<Particle> ps = state.particles();
  for (auto& p : ps) p.v = -p.v;
  return PhasePoint(state.dim(), std::move(ps));
}

Trajectory evolve(const PhasePoint& state, double t0, double t1, const FlowOptions& opts) {
  if (!(t1 >= t0)) throw std::invalid_argument("evolve requires t1 >= t0");
  Scheduler sched(state, t0, opts);
  const bool dispersed = sched.run(t1);
  sched.advance_to(t1);
  Trajectory traj{state, t0, std::move(sched.events()), t1, sched.state(), dispersed};
  return traj;
}

Trajectory evolve_to_dispersal(const PhasePoint& state, double t0, const FlowOptions& opts) {
  Scheduler sched(state, t0, opts);
  sched.run(std::nullopt);
  const double final_time = sched.now();
  return Trajectory{state, t0, std::move(sched.events()), final_time, sched.state(), true};
}

}  // namespace hsvirial
