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

#include "hsvirial/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hsvirial {

namespace {

constexpr double kTieRelTol = 1e-12;

void check_dim(int dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw std::invalid_argument("dimension must be in [2, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(dim));
  }
}

}  // namespace

SpaceVec::SpaceVec(int dim) : dim_(dim) { check_dim(dim); }

SpaceVec::SpaceVec(std::initializer_list<double> components)
    : SpaceVec(std::span<const double>(components.begin(), components.size())) {}

SpaceVec::SpaceVec(std::span<const double> components)
    : dim_(static_cast<int>(components.size())) {
  check_dim(dim_);
  std::copy(components.begin(), components.end(), c_.begin());
}

bool SpaceVec::is_finite() const {
  return std::all_of(c_.begin(), c_.begin() + dim_, [](double a) { return std::isfinite(a); });
}

SpaceVec& SpaceVec::operator+=(const SpaceVec& o) {
  for (int k = 0; k < dim_; ++k) c_[k] += o.c_[k];
  return *this;
}

SpaceVec& SpaceVec::operator-=(const SpaceVec& o) {
  for (int k = 0; k < dim_; ++k) c_[k] -= o.c_[k];
  return *this;
}

SpaceVec& SpaceVec::operator*=(double s) {
  for (int k = 0; k < dim_; ++k) c_[k] *= s;
  return *this;
}

bool operator==(const SpaceVec& a, const SpaceVec& b) {
  if (a.dim_ != b.dim_) return false;
  return std::equal(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin());
}

double dot(const SpaceVec& a, const SpaceVec& b) {
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(const SpaceVec& a) { return dot(a, a); }

double norm(const SpaceVec& a) { return std::sqrt(norm2(a)); }

PhasePoint::PhasePoint(int dim, std::vector<Particle> particles)
    : dim_(dim), particles_(std::move(particles)) {
  check_dim(dim);
  if (particles_.empty()) throw std::invalid_argument("phase point needs at least one particle");
  for (const auto& p : particles_) {
    if (p.x.dim() != dim || p.v.dim() != dim) {
      throw std::invalid_argument("particle dimension does not match phase point dimension");
    }
    if (!p.x.is_finite() || !p.v.is_finite()) {
      throw std::invalid_argument("non-finite particle coordinate");
    }
  }
}

double PhasePoint::min_pair_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    for (std::size_t j = i + 1; j < particles_.size(); ++j) {
      best = std::min(best, norm2(particles_[j].x - particles_[i].x));
    }
  }
  return std::sqrt(best);
}

bool PhasePoint::is_admissible(double tol) const { return min_pair_distance() >= 1.0 - tol; }

bool PhasePoint::is_interior(double tol) const { return min_pair_distance() > 1.0 + tol; }

PhasePoint permute(const PhasePoint& state, std::span<const std::size_t> sigma) {
  const std::size_t n = state.size();
  if (sigma.size() != n) throw std::invalid_argument("permutation length mismatch");
  std::vector<bool> seen(n, false);
  std::vector<Particle> out;
  out.reserve(n);
  for (std::size_t k : sigma) {
    if (k >= n || seen[k]) throw std::invalid_argument("not a permutation");
    seen[k] = true;
    out.push_back(state[k]);
  }
  return PhasePoint(state.dim(), std::move(out));
}

double energy(const PhasePoint& state) {
  double e = 0.0;
  for (const auto& p : state.particles()) e += norm2(p.v);
  return e;
}

SpaceVec momentum(const PhasePoint& state) {
  SpaceVec m = SpaceVec::zero(state.dim());
  for (const auto& p : state.particles()) m += p.v;
  return m;
}

double inertia(const PhasePoint& state) {
  double s = 0.0;
  for (const auto& p : state.particles()) s += norm2(p.x);
  return s;
}

double virial(const PhasePoint& state, double t) {
  double r = 0.0;
  for (const auto& p : state.particles()) r += dot(p.x, p.v) - norm2(p.v) * t;
  return r;
}

Functionals functionals(const PhasePoint& state, double t) {
  return {energy(state), momentum(state), inertia(state), virial(state, t)};
}

double pair_virial_strength(const PhasePoint& state, std::size_t i, std::size_t j) {
  if (i >= state.size() || j >= state.size()) throw std::out_of_range("particle index out of range");
  if (i == j) throw std::invalid_argument("pair_virial_strength needs i != j");
  const auto& a = state[i];
  const auto& b = state[j];
  return std::abs(dot(b.x - a.x, b.v - a.v));
}

std::pair<std::size_t, std::size_t> closest_pair(const PhasePoint& state) {
  if (state.size() < 2) throw std::invalid_argument("closest_pair needs at least two particles");
  std::pair<std::size_t, std::size_t> best{0, 1};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = i + 1; j < state.size(); ++j) {
      // distances equal up to rounding count as ties; the first pair wins
      const double d2 = norm2(state[j].x - state[i].x);
      if (d2 < best_d2 * (1.0 - kTieRelTol)) {
        best_d2 = d2;
        best = {i, j};
      }
    }
  }
  return best;
}

double collision_parameter(const PhasePoint& state) {
  const auto [i, j] = closest_pair(state);
  return pair_virial_strength(state, i, j);
}

}  // namespace hsvirial
