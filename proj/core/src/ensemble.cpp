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

#include "hsvirial/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "hsvirial/error.hpp"

namespace hsvirial {

namespace {

double ball_volume(int d, double r) {
  const double half_d = 0.5 * d;
  return std::pow(std::numbers::pi, half_d) / std::tgamma(half_d + 1.0) * std::pow(r, d);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t draw, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Uniform in the radius-r ball by rejection from the enclosing cube.
SpaceVec uniform_in_ball(std::mt19937_64& rng, int d, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpaceVec p(d);
  while (true) {
    double n2 = 0.0;
    for (int k = 0; k < d; ++k) {
      p[k] = u(rng);
      n2 += p[k] * p[k];
    }
    if (n2 <= 1.0) return p * r;
  }
}

SpaceVec sample_position(std::mt19937_64& rng, const InitialEnsemble& ens) {
  if (ens.position_law == PositionLaw::UniformBall) {
    return uniform_in_ball(rng, ens.dim, ens.position_scale);
  }
  std::uniform_real_distribution<double> u(-0.5 * ens.position_scale, 0.5 * ens.position_scale);
  SpaceVec p(ens.dim);
  for (int k = 0; k < ens.dim; ++k) p[k] = u(rng);
  return p;
}

SpaceVec sample_velocity(std::mt19937_64& rng, const InitialEnsemble& ens) {
  if (ens.velocity_law == VelocityLaw::UniformBall) {
    return uniform_in_ball(rng, ens.dim, ens.velocity_scale);
  }
  std::normal_distribution<double> g(0.0, 1.0);
  SpaceVec v(ens.dim);
  for (int k = 0; k < ens.dim; ++k) v[k] = ens.velocity_scale * g(rng);
  return v;
}

bool pairwise_separated(const std::vector<SpaceVec>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (!(norm2(xs[j] - xs[i]) > 1.0)) return false;
    }
  }
  return true;
}

SampleOutcome simulate_draw(const InitialEnsemble& ens, std::uint64_t draw, const FlowOptions& flow) {
  const PhasePoint z = sample_initial(ens, draw, kTrajectoryStream);
  const Trajectory fwd = evolve_to_dispersal(z, 0.0, flow);
  const Trajectory bwd = evolve_to_dispersal(reverse(z), 0.0, flow);

  SampleOutcome out;
  out.draw = draw;
  out.forward_events = fwd.events.size();
  out.backward_events = bwd.events.size();
  out.forward_total = collision_strength_total(fwd);
  out.backward_total = collision_strength_total(bwd);
  out.energy = energy(z);
  out.inertia = inertia(z);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> per_pair;
  for (const Trajectory* t : {&fwd, &bwd}) {
    for (const auto& e : t->events) {
      per_pair[{static_cast<std::uint32_t>(e.i), static_cast<std::uint32_t>(e.j)}] += e.strength;
    }
  }
  out.pairs.reserve(per_pair.size());
  for (const auto& [ij, w] : per_pair) out.pairs.push_back({ij.first, ij.second, w});
  return out;
}

double pair_scale(std::size_t n, std::size_t s) {
  return static_cast<double>(s * (s - 1)) / static_cast<double>(n * (n - 1));
}

void check_order(std::size_t n, std::size_t s) {
  if (s < 2 || s > n) {
    throw std::out_of_range("marginal order s=" + std::to_string(s) + " must lie in [2, N=" +
                            std::to_string(n) + "]");
  }
}

}  // namespace

std::string_view to_string(PositionLaw law) {
  return law == PositionLaw::UniformBall ? "uniform-ball" : "uniform-cube";
}

std::string_view to_string(VelocityLaw law) {
  return law == VelocityLaw::IsotropicGaussian ? "isotropic-gaussian" : "uniform-ball";
}

PositionLaw parse_position_law(std::string_view s) {
  if (s == "uniform-ball") return PositionLaw::UniformBall;
  if (s == "uniform-cube") return PositionLaw::UniformCube;
  throw std::invalid_argument("unknown position law '" + std::string(s) + "'");
}

VelocityLaw parse_velocity_law(std::string_view s) {
  if (s == "isotropic-gaussian" || s == "gaussian") return VelocityLaw::IsotropicGaussian;
  if (s == "uniform-ball") return VelocityLaw::UniformBall;
  throw std::invalid_argument("unknown velocity law '" + std::string(s) + "'");
}

void InitialEnsemble::validate() const {
  if (n < 1) throw std::invalid_argument("ensemble needs N >= 1");
  if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("ensemble dimension out of range");
  if (!(position_scale > 0.0) || !std::isfinite(position_scale)) {
    throw std::invalid_argument("position scale must be positive");
  }
  if (!(velocity_scale >= 0.0) || !std::isfinite(velocity_scale) || !std::isfinite(drift)) {
    throw std::invalid_argument("velocity parameters must be finite and non-negative");
  }
  const double domain = position_law == PositionLaw::UniformBall
                            ? ball_volume(dim, position_scale)
                            : std::pow(position_scale, dim);
  const double spheres = static_cast<double>(n) * ball_volume(dim, 0.5);
  if (spheres > 0.3 * domain) {
    throw PackingError("packing too dense: N spheres fill " + std::to_string(spheres / domain) +
                       " of the domain (limit 0.3)");
  }
}

PhasePoint sample_initial(const InitialEnsemble& ens, std::uint64_t draw, std::uint64_t stream) {
  ens.validate();
  auto rng = make_engine(ens.seed, draw, stream);
  std::vector<SpaceVec> xs(ens.n);
  bool placed = false;
  for (int attempt = 0; attempt < kMaxRejections && !placed; ++attempt) {
    for (auto& x : xs) x = sample_position(rng, ens);
    placed = pairwise_separated(xs);
  }
  if (!placed) {
    throw PackingError("packing too dense: no admissible configuration after " +
                       std::to_string(kMaxRejections) + " attempts");
  }
  std::vector<Particle> ps;
  ps.reserve(ens.n);
  for (const auto& x : xs) {
    SpaceVec v = sample_velocity(rng, ens);
    if (ens.drift != 0.0) v += x * ens.drift;
    ps.push_back({x, v});
  }
  return PhasePoint(ens.dim, std::move(ps));
}

double collision_strength_total(const Trajectory& traj) {
  if (!traj.dispersed) throw std::invalid_argument("collision total needs a dispersed trajectory");
  return traj.jump_sum();
}

double SampleOutcome::lambda_star_slack() const {
  return 4.0 * std::sqrt(inertia) * std::sqrt(energy) - total();
}

std::vector<SampleOutcome> run_samples(const InitialEnsemble& ens, std::size_t samples,
                                       const EnsembleOptions& opts) {
  ens.validate();
  std::vector<SampleOutcome> out(samples);
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(samples, 1)));

  // Each worker owns the draws k = w, w + T, ... and writes only its own
  // slots; the first failure by draw index is rethrown.
  std::vector<std::pair<std::size_t, std::exception_ptr>> failures(threads, {samples, nullptr});
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < samples; k += threads) {
          try {
            out[k] = simulate_draw(ens, k, opts.flow);
          } catch (...) {
            failures[w] = {k, std::current_exception()};
            return;
          }
        }
      });
    }
  }
  const auto first = std::min_element(failures.begin(), failures.end(),
                                      [](const auto& a, const auto& b) { return a.first < b.first; });
  if (first != failures.end() && first->second) std::rethrow_exception(first->second);
  return out;
}

MeanEstimate mean_estimate(const std::vector<double>& values) {
  MeanEstimate m;
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    const double n = static_cast<double>(values.size());
    m.stderr_mean = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

bool EstimateReport::bound_holds() const {
  if (!lhs_stderr) return true;
  return bound_ratio + 3.0 * (*lhs_stderr / rhs_bound) < 1.0;
}

bool EstimateReport::estimators_agree() const {
  if (!lhs_stderr || !tagged_stderr) return true;
  const double combined = std::sqrt(*lhs_stderr * *lhs_stderr + *tagged_stderr * *tagged_stderr);
  const double diff = std::abs(lhs_estimate - tagged_lhs);
  return diff <= 3.0 * combined + 1e-12 * std::max(std::abs(lhs_estimate), std::abs(tagged_lhs));
}

double default_c_d(std::size_t n) {
  if (n < 2) throw std::invalid_argument("c_d default needs N >= 2");
  return 4.0 * static_cast<double>(n) / static_cast<double>(n - 1);
}

EstimateReport estimate_marginal_lhs(const std::vector<SampleOutcome>& outcomes, std::size_t n,
                                     std::size_t s) {
  check_order(n, s);
  if (outcomes.empty()) throw std::invalid_argument("estimate needs at least one sample");
  std::vector<double> totals;
  totals.reserve(outcomes.size());
  for (const auto& o : outcomes) totals.push_back(o.total());
  const MeanEstimate m = mean_estimate(totals);
  const double scale = pair_scale(n, s);
  EstimateReport rep;
  rep.n = n;
  rep.s = s;
  rep.samples = outcomes.size();
  rep.lhs_estimate = scale * m.mean;
  if (m.stderr_mean) rep.lhs_stderr = scale * *m.stderr_mean;
  return rep;
}

EstimateReport estimate_marginal_lhs(const InitialEnsemble& ens, std::size_t s, std::size_t samples,
                                     const EnsembleOptions& opts) {
  check_order(ens.n, s);
  return estimate_marginal_lhs(run_samples(ens, samples, opts), ens.n, s);
}

MeanEstimate tagged_pair_lhs(const std::vector<SampleOutcome>& outcomes, std::size_t s) {
  std::vector<double> restricted;
  restricted.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    double sum = 0.0;
    for (const auto& p : o.pairs) {
      if (p.j < s) sum += p.strength;
    }
    restricted.push_back(sum);
  }
  return mean_estimate(restricted);
}

MomentEstimate estimate_moments(const InitialEnsemble& ens, std::size_t samples) {
  if (samples < 1) throw std::invalid_argument("moment estimate needs at least one sample");
  MomentEstimate m;
  const double n = static_cast<double>(ens.n);
  double sum_x = 0.0;
  double sum_v = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const PhasePoint z = sample_initial(ens, k, kMomentStream);
    sum_x += inertia(z) / n;
    sum_v += energy(z) / n;
  }
  m.moment_x = sum_x / static_cast<double>(samples);
  m.moment_v = sum_v / static_cast<double>(samples);
  if (ens.drift == 0.0) {
    const double d = ens.dim;
    const double a = ens.velocity_scale;
    m.moment_v = ens.velocity_law == VelocityLaw::IsotropicGaussian ? d * a * a : d / (d + 2.0) * a * a;
    m.moment_v_analytic = true;
  }
  return m;
}

double rhs_bound(const MomentEstimate& m, std::size_t n, std::size_t s, double c_d) {
  if (!(c_d > 0.0)) throw std::invalid_argument("c_d must be positive");
  return c_d * static_cast<double>(s * (s - 1)) / static_cast<double>(n) * std::sqrt(m.moment_x) *
         std::sqrt(m.moment_v);
}

double compute_rhs_bound(const InitialEnsemble& ens, std::size_t s, std::size_t samples, double c_d) {
  check_order(ens.n, s);
  return rhs_bound(estimate_moments(ens, samples), ens.n, s, c_d);
}

EstimateReport assemble_report(const std::vector<SampleOutcome>& outcomes, const MomentEstimate& m,
                               std::size_t n, std::size_t s, double c_d) {
  EstimateReport rep = estimate_marginal_lhs(outcomes, n, s);
  const MeanEstimate tagged = tagged_pair_lhs(outcomes, s);
  rep.tagged_lhs = tagged.mean;
  rep.tagged_stderr = tagged.stderr_mean;
  rep.moment_x = m.moment_x;
  rep.moment_v = m.moment_v;
  rep.moment_v_analytic = m.moment_v_analytic;
  rep.c_d_used = c_d;
  rep.rhs_bound = rhs_bound(m, n, s, c_d);
  rep.bound_ratio = rep.lhs_estimate / rep.rhs_bound;
  return rep;
}

EstimateReport verify_spacetime_estimate(const InitialEnsemble& ens, std::size_t s,
                                         std::size_t samples, double c_d,
                                         const EnsembleOptions& opts) {
  check_order(ens.n, s);
  const auto outcomes = run_samples(ens, samples, opts);
  return assemble_report(outcomes, estimate_moments(ens, samples), ens.n, s, c_d);
}

}  // namespace hsvirial
