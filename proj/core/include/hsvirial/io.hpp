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

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsvirial/ensemble.hpp"
#include "hsvirial/flow.hpp"
#include "hsvirial/phase.hpp"
#include "hsvirial/virial.hpp"

namespace hsvirial {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kTrajectoryFormatVersion = 1;

/// Shortest-exact decimal form: 17 significant digits.
std::string format_real(double x);

nlohmann::json state_to_json(const PhasePoint& state);
/// Accepts {"dim": d, "particles": [{"x": [...], "v": [...]}, ...]}.
PhasePoint state_from_json(const nlohmann::json& j);

/// Newline-delimited records: one header (config echo, initial state),
/// one record per collision (1-based indices), one final-state record.
/// Reals are written with 17 significant digits so the file round-trips
/// binary64 exactly.
void write_trajectory(std::ostream& os, const Trajectory& traj, const nlohmann::json& config);
/// Throws FormatError on malformed input.
Trajectory read_trajectory(std::istream& is);
/// Config echo stored in a trajectory header.
nlohmann::json read_trajectory_config(std::istream& is);

std::string event_record(const CollisionEvent& e);

nlohmann::json to_json(const EstimateReport& rep);
nlohmann::json to_json(const SuiteReport& rep);

/// One CSV row per sampled realization.
void write_summary_csv(std::ostream& os, const std::vector<SampleOutcome>& outcomes);

}  // namespace hsvirial
