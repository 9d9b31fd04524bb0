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

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace hsvirial {

/// Largest supported spatial dimension. Vectors are stored inline.
inline constexpr int kMaxDim = 8;

/// Accepted overlap between sphere centers, in diameters.
inline constexpr double kTolOverlap = 1e-9;
/// Half-width of the contact band |x_i - x_j| = 1.
inline constexpr double kTolContact = 1e-9;

/// A point or displacement in R^d, 2 <= d <= kMaxDim.
class SpaceVec {
 public:
  SpaceVec() = default;
  explicit SpaceVec(int dim);
  SpaceVec(std::initializer_list<double> components);
  explicit SpaceVec(std::span<const double> components);

  static SpaceVec zero(int dim) { return SpaceVec(dim); }

  int dim() const { return dim_; }
  double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  std::span<const double> components() const {
    return {c_.data(), static_cast<std::size_t>(dim_)};
  }

  bool is_finite() const;

  SpaceVec& operator+=(const SpaceVec& o);
  SpaceVec& operator-=(const SpaceVec& o);
  SpaceVec& operator*=(double s);

  friend SpaceVec operator+(SpaceVec a, const SpaceVec& b) { return a += b; }
  friend SpaceVec operator-(SpaceVec a, const SpaceVec& b) { return a -= b; }
  friend SpaceVec operator*(SpaceVec a, double s) { return a *= s; }
  friend SpaceVec operator*(double s, SpaceVec a) { return a *= s; }
  friend SpaceVec operator-(SpaceVec a) { return a *= -1.0; }
  friend bool operator==(const SpaceVec& a, const SpaceVec& b);

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

double dot(const SpaceVec& a, const SpaceVec& b);
double norm2(const SpaceVec& a);
double norm(const SpaceVec& a);

struct Particle {
  SpaceVec x;
  SpaceVec v;

  friend bool operator==(const Particle&, const Particle&) = default;
};

/// Full microstate (X_N, V_N) of N unit-diameter spheres in R^d.
///
/// Construction validates dimensions and finiteness only. Admissibility
/// (no overlaps) is a separate query because free flight past a missed
/// collision legitimately produces overlapping states that callers need
/// to inspect.
class PhasePoint {
 public:
  PhasePoint() = default;
  PhasePoint(int dim, std::vector<Particle> particles);

  int dim() const { return dim_; }
  std::size_t size() const { return particles_.size(); }
  const std::vector<Particle>& particles() const { return particles_; }
  const Particle& operator[](std::size_t i) const { return particles_[i]; }

  /// Smallest center distance over all pairs; +inf for N < 2.
  double min_pair_distance() const;
  /// Every pair at distance >= 1 - tol.
  bool is_admissible(double tol = kTolOverlap) const;
  /// Admissible and every pair strictly farther apart than 1 + tol.
  bool is_interior(double tol = kTolContact) const;

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

 private:
  int dim_ = 0;
  std::vector<Particle> particles_;
};

/// sigma Z = (z_sigma(0), ..., z_sigma(N-1)); sigma must be a permutation.
PhasePoint permute(const PhasePoint& state, std::span<const std::size_t> sigma);

/// Sum of |v_i|^2 (twice the kinetic energy at unit mass).
double energy(const PhasePoint& state);
SpaceVec momentum(const PhasePoint& state);
/// Moment of inertia I_N = sum |x_i|^2.
double inertia(const PhasePoint& state);
/// Virial functional r_N(t, Z) = sum (x_i . v_i - |v_i|^2 t).
double virial(const PhasePoint& state, double t);

struct Functionals {
  double energy = 0.0;
  SpaceVec momentum;
  double inertia = 0.0;
  double virial = 0.0;
};

Functionals functionals(const PhasePoint& state, double t);

/// |(x_j - x_i) . (v_j - v_i)|. Indices are 0-based.
double pair_virial_strength(const PhasePoint& state, std::size_t i, std::size_t j);

/// Pair (i, j), i < j, minimizing |x_i - x_j|; ties go to the
/// lexicographically smallest pair. Requires N >= 2.
std::pair<std::size_t, std::size_t> closest_pair(const PhasePoint& state);

/// W_N: pair_virial_strength evaluated at the closest pair.
double collision_parameter(const PhasePoint& state);

}  // namespace hsvirial
