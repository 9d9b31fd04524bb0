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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hsvirial/ensemble.hpp"
#include "hsvirial/flow.hpp"

namespace hsvirial::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kCheckFailure = 2,
  kScheduling = 3,
  kPacking = 4,
};

/// Resolved configuration of one run. Precedence: command line, then
/// --config file, then the defaults below.
struct RunConfig {
  std::string mode;  // simulate | verify | ensemble
  std::size_t n = 20;
  int dim = 2;
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  std::size_t s_order = 2;
  std::optional<double> c_d;  // default 4N/(N-1)
  std::string position_law = "uniform-ball";
  double radius = 15.0;
  std::string velocity_law = "uniform-ball";
  double sigma = 1.0;
  double drift = 0.0;
  std::optional<double> t_end;  // unset: run until dispersal
  std::string state_file;
  std::string trajectory_file;
  std::string out;
  std::string summary;
  unsigned threads = 0;
  double max_time = 1e4;
  std::uint64_t max_events = 10'000'000;
  double tol_time = 1e-12;
  double identity_tol = 1e-8;
  bool fault_inject = false;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  InitialEnsemble ensemble() const;
  FlowOptions flow() const;
  double resolved_c_d() const;
  /// Full resolved configuration, embedded in every output file.
  nlohmann::json to_json() const;
};

int run_simulate(const RunConfig& cfg, std::ostream& log);
int run_verify(const RunConfig& cfg, std::ostream& log);
int run_ensemble(const RunConfig& cfg, std::ostream& log);

/// Runs a command, mapping library failures onto exit codes.
int dispatch(const RunConfig& cfg, std::ostream& log);

/// Parses argv and runs. `test_hooks` exposes --fault-inject.
int main_entry(int argc, char** argv, bool test_hooks);

}  // namespace hsvirial::cli
