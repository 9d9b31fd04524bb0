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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hsvirial/ensemble.hpp"
#include "hsvirial/flow.hpp"
#include "hsvirial/virial.hpp"

namespace {

using namespace hsvirial;

InitialEnsemble bench_ensemble(std::size_t n, double radius) {
  InitialEnsemble e;
  e.n = n;
  e.dim = 2;
  e.position_scale = radius;
  e.velocity_law = VelocityLaw::IsotropicGaussian;
  e.seed = 3;
  return e;
}

void BM_PredictPair(benchmark::State& state) {
  const Particle p{{0, 0}, {1, 0.1}};
  const Particle q{{3, 0.4}, {-1, 0}};
  for (auto _ : state) benchmark::DoNotOptimize(predict_pair_collision(p, q, 0.0));
}
BENCHMARK(BM_PredictPair);

// side x side square lattice, spacing 1.5, velocities pointing inward plus noise
PhasePoint converging_cluster(int side) {
  std::mt19937_64 rng(side);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<Particle> ps;
  const double c = 0.75 * (side - 1);
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      const SpaceVec x{1.5 * a - c, 1.5 * b - c};
      ps.push_back({x, x * -0.2 + SpaceVec{g(rng), g(rng)}});
    }
  }
  return PhasePoint(2, std::move(ps));
}

// Dispersal of a collapsing cluster of side^2 spheres.
void BM_EvolveToDispersal(benchmark::State& state) {
  const PhasePoint z = converging_cluster(static_cast<int>(state.range(0)));
  std::size_t events = 0;
  for (auto _ : state) {
    const Trajectory t = evolve_to_dispersal(z, 0.0);
    events += t.events.size();
    benchmark::DoNotOptimize(t.final_state);
  }
  state.counters["events/run"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_EvolveToDispersal)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TwoSidedSuite(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PhasePoint z = sample_initial(bench_ensemble(n, 15.0), 0);
  const Trajectory fwd = evolve_to_dispersal(z, 0.0);
  const Trajectory bwd = evolve_to_dispersal(reverse(z), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(fwd, bwd));
}
BENCHMARK(BM_TwoSidedSuite)->Arg(5)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_EnsembleSamples(benchmark::State& state) {
  const InitialEnsemble e = bench_ensemble(20, 15.0);
  EnsembleOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_samples(e, 256, opts));
}
BENCHMARK(BM_EnsembleSamples)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
