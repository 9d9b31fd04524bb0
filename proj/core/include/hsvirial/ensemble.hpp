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
#include <string>
#include <string_view>
#include <vector>

#include "hsvirial/flow.hpp"
#include "hsvirial/phase.hpp"

namespace hsvirial {

enum class PositionLaw { UniformBall, UniformCube };
enum class VelocityLaw { IsotropicGaussian, UniformBall };

std::string_view to_string(PositionLaw law);
std::string_view to_string(VelocityLaw law);
PositionLaw parse_position_law(std::string_view s);
VelocityLaw parse_velocity_law(std::string_view s);

/// Sampling law for the initial density: positions i.i.d. from
/// position_law conditioned jointly on no overlap, velocities i.i.d.
/// from velocity_law. The law is exchangeable by construction.
struct InitialEnsemble {
  std::size_t n = 20;
  int dim = 2;
  PositionLaw position_law = PositionLaw::UniformBall;
  /// Ball radius R, or cube side L (cube is [-L/2, L/2]^d).
  double position_scale = 15.0;
  VelocityLaw velocity_law = VelocityLaw::UniformBall;
  /// Gaussian sigma per component, or velocity ball radius V.
  double velocity_scale = 1.0;
  /// Adds drift * x_i to every velocity (radial expansion). Zero by default.
  double drift = 0.0;
  std::uint64_t seed = 1;

  /// Throws PackingError unless N vol(sphere) <= 0.3 vol(domain), and
  /// std::invalid_argument for nonsensical parameters.
  void validate() const;
};

/// Draw `draw` of stream `stream`. Deterministic in (ens, draw, stream).
/// Throws PackingError after 1e5 rejected configurations.
PhasePoint sample_initial(const InitialEnsemble& ens, std::uint64_t draw, std::uint64_t stream = 0);

inline constexpr std::uint64_t kTrajectoryStream = 0;
inline constexpr std::uint64_t kMomentStream = 1;
inline constexpr int kMaxRejections = 100'000;

/// Sum of collision strengths of a dispersed trajectory.
double collision_strength_total(const Trajectory& traj);

/// Per-pair collision strength of one two-sided realization.
struct PairContribution {
  std::uint32_t i;
  std::uint32_t j;
  double strength;
};

/// Everything the estimators need from one sampled initial state.
struct SampleOutcome {
  std::uint64_t draw = 0;
  std::size_t forward_events = 0;
  std::size_t backward_events = 0;
  double forward_total = 0.0;
  double backward_total = 0.0;
  double energy = 0.0;
  double inertia = 0.0;
  /// Per pair, accumulated over both time directions; pairs without
  /// collisions are omitted. Sorted by (i, j).
  std::vector<PairContribution> pairs;

  double total() const { return forward_total + backward_total; }
  /// 4 sqrt(I_N) sqrt(energy) - total: slack of the lambda-optimal bound.
  double lambda_star_slack() const;
};

struct EnsembleOptions {
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  FlowOptions flow{};
};

/// Runs forward and backward dispersal for draws [0, samples). Results
/// are ordered by draw and independent of the thread count.
std::vector<SampleOutcome> run_samples(const InitialEnsemble& ens, std::size_t samples,
                                       const EnsembleOptions& opts = {});

struct MeanEstimate {
  double mean = 0.0;
  /// Standard error of the mean; empty for fewer than two samples.
  std::optional<double> stderr_mean;
};

MeanEstimate mean_estimate(const std::vector<double>& values);

struct EstimateReport {
  std::size_t n = 0;
  std::size_t s = 0;
  std::size_t samples = 0;
  double lhs_estimate = 0.0;
  std::optional<double> lhs_stderr;
  /// Independent route: mean of strengths of pairs inside {1..s} only.
  double tagged_lhs = 0.0;
  std::optional<double> tagged_stderr;
  double moment_x = 0.0;
  double moment_v = 0.0;
  bool moment_v_analytic = false;
  double rhs_bound = 0.0;
  double c_d_used = 0.0;
  double bound_ratio = 0.0;

  /// bound_ratio + 3 lhs_stderr / rhs_bound < 1; vacuously true without
  /// a standard error.
  bool bound_holds() const;
  /// |lhs - tagged| <= 3 sqrt(se_lhs^2 + se_tagged^2).
  bool estimators_agree() const;
};

/// 4 N / (N - 1): the lambda-optimal corollary plus Cauchy-Schwarz.
double default_c_d(std::size_t n);

/// Symmetry-reduced left side: s(s-1)/(N(N-1)) times the mean total.
/// Fills n, s, samples, lhs_estimate, lhs_stderr.
EstimateReport estimate_marginal_lhs(const std::vector<SampleOutcome>& outcomes, std::size_t n,
                                     std::size_t s);
EstimateReport estimate_marginal_lhs(const InitialEnsemble& ens, std::size_t s, std::size_t samples,
                                     const EnsembleOptions& opts = {});

/// Per-pair tagged estimator over pairs i < j <= s (1-based).
MeanEstimate tagged_pair_lhs(const std::vector<SampleOutcome>& outcomes, std::size_t s);

struct MomentEstimate {
  double moment_x = 0.0;
  double moment_v = 0.0;
  bool moment_v_analytic = false;
};

/// Second moments of the one-particle marginal of f_N(0), from fresh
/// draws of the moment stream. moment_v is analytic when the law allows.
MomentEstimate estimate_moments(const InitialEnsemble& ens, std::size_t samples);

/// c_d s(s-1)/N sqrt(moment_x) sqrt(moment_v).
double rhs_bound(const MomentEstimate& m, std::size_t n, std::size_t s, double c_d);
double compute_rhs_bound(const InitialEnsemble& ens, std::size_t s, std::size_t samples, double c_d);

/// Assembles a full report from precomputed outcomes and moments.
EstimateReport assemble_report(const std::vector<SampleOutcome>& outcomes, const MomentEstimate& m,
                               std::size_t n, std::size_t s, double c_d);

EstimateReport verify_spacetime_estimate(const InitialEnsemble& ens, std::size_t s,
                                         std::size_t samples, double c_d,
                                         const EnsembleOptions& opts = {});

}  // namespace hsvirial
