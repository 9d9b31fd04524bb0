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

#include "hsvirial/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "hsvirial/error.hpp"

namespace hsvirial {

namespace {

using nlohmann::json;

std::string vec_text(const SpaceVec& v) {
  std::string out = "[";
  for (int k = 0; k < v.dim(); ++k) {
    if (k) out += ',';
    out += format_real(v[k]);
  }
  out += ']';
  return out;
}

std::string particles_text(const PhasePoint& z) {
  std::string out = "[";
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) out += ',';
    out += "{\"x\":" + vec_text(z[i].x) + ",\"v\":" + vec_text(z[i].v) + "}";
  }
  out += ']';
  return out;
}

SpaceVec vec_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("expected an array of reals");
  std::vector<double> c;
  c.reserve(j.size());
  for (const auto& x : j) c.push_back(x.get<double>());
  return SpaceVec(std::span<const double>(c));
}

std::vector<Particle> particles_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("expected an array of particles");
  std::vector<Particle> ps;
  ps.reserve(j.size());
  for (const auto& p : j) ps.push_back({vec_from_json(p.at("x")), vec_from_json(p.at("v"))});
  return ps;
}

json optional_real(const std::optional<double>& x) {
  if (x) return *x;
  return "n/a";
}

json parse_line(const std::string& line, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
  }
}

}  // namespace

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

json state_to_json(const PhasePoint& state) {
  json ps = json::array();
  for (const auto& p : state.particles()) {
    json x = json::array();
    json v = json::array();
    for (double c : p.x.components()) x.push_back(c);
    for (double c : p.v.components()) v.push_back(c);
    ps.push_back({{"x", x}, {"v", v}});
  }
  return {{"dim", state.dim()}, {"particles", ps}};
}

PhasePoint state_from_json(const json& j) {
  try {
    return PhasePoint(j.at("dim").get<int>(), particles_from_json(j.at("particles")));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad state document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad state document: ") + e.what());
  }
}

std::string event_record(const CollisionEvent& e) {
  return "{\"type\":\"event\",\"time\":" + format_real(e.time) + ",\"i\":" + std::to_string(e.i + 1) +
         ",\"j\":" + std::to_string(e.j + 1) + ",\"omega\":" + vec_text(e.omega) +
         ",\"v_i_pre\":" + vec_text(e.v_i_pre) + ",\"v_j_pre\":" + vec_text(e.v_j_pre) +
         ",\"v_i_post\":" + vec_text(e.v_i_post) + ",\"v_j_post\":" + vec_text(e.v_j_post) +
         ",\"strength\":" + format_real(e.strength) + "}";
}

void write_trajectory(std::ostream& os, const Trajectory& traj, const json& config) {
  os << "{\"type\":\"header\",\"format\":\"hsvirial-trajectory\",\"version\":"
     << kTrajectoryFormatVersion << ",\"tool_version\":\"" << kToolVersion
     << "\",\"config\":" << config.dump() << ",\"dim\":" << traj.initial.dim()
     << ",\"n\":" << traj.initial.size() << ",\"t0\":" << format_real(traj.t0)
     << ",\"initial\":" << particles_text(traj.initial) << "}\n";
  for (const auto& e : traj.events) os << event_record(e) << '\n';
  os << "{\"type\":\"final\",\"final_time\":" << format_real(traj.final_time)
     << ",\"dispersed\":" << (traj.dispersed ? "true" : "false")
     << ",\"events\":" << traj.events.size() << ",\"state\":" << particles_text(traj.final_state)
     << "}\n";
}

Trajectory read_trajectory(std::istream& is) {
  Trajectory traj;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool have_final = false;
  int dim = 0;
  try {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json rec = parse_line(line, lineno);
      const std::string type = rec.at("type").get<std::string>();
      if (type == "header") {
        if (rec.at("format") != "hsvirial-trajectory") throw FormatError("not a trajectory file");
        dim = rec.at("dim").get<int>();
        traj.t0 = rec.at("t0").get<double>();
        traj.initial = PhasePoint(dim, particles_from_json(rec.at("initial")));
        have_header = true;
      } else if (type == "event") {
        if (!have_header) throw FormatError("event before header");
        CollisionEvent e;
        e.time = rec.at("time").get<double>();
        const auto i = rec.at("i").get<std::size_t>();
        const auto j = rec.at("j").get<std::size_t>();
        if (i < 1 || j <= i || j > traj.initial.size()) {
          throw FormatError("line " + std::to_string(lineno) + ": bad particle pair");
        }
        e.i = i - 1;
        e.j = j - 1;
        e.omega = vec_from_json(rec.at("omega"));
        e.v_i_pre = vec_from_json(rec.at("v_i_pre"));
        e.v_j_pre = vec_from_json(rec.at("v_j_pre"));
        e.v_i_post = vec_from_json(rec.at("v_i_post"));
        e.v_j_post = vec_from_json(rec.at("v_j_post"));
        e.strength = rec.at("strength").get<double>();
        traj.events.push_back(std::move(e));
      } else if (type == "final") {
        if (!have_header) throw FormatError("final record before header");
        traj.final_time = rec.at("final_time").get<double>();
        traj.dispersed = rec.at("dispersed").get<bool>();
        traj.final_state = PhasePoint(dim, particles_from_json(rec.at("state")));
        have_final = true;
      } else {
        throw FormatError("line " + std::to_string(lineno) + ": unknown record type " + type);
      }
    }
  } catch (const json::exception& e) {
    throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_header || !have_final) throw FormatError("trajectory file is missing header or final record");
  return traj;
}

json read_trajectory_config(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json rec = parse_line(line, 1);
    if (rec.value("type", "") != "header") break;
    return rec.value("config", json::object());
  }
  throw FormatError("trajectory file has no header");
}

json to_json(const EstimateReport& rep) {
  return {{"n", rep.n},
          {"s", rep.s},
          {"samples", rep.samples},
          {"lhs_estimate", rep.lhs_estimate},
          {"lhs_stderr", optional_real(rep.lhs_stderr)},
          {"tagged_lhs", rep.tagged_lhs},
          {"tagged_stderr", optional_real(rep.tagged_stderr)},
          {"moment_x", rep.moment_x},
          {"moment_v", rep.moment_v},
          {"moment_v_analytic", rep.moment_v_analytic},
          {"rhs_bound", rep.rhs_bound},
          {"c_d_used", rep.c_d_used},
          {"bound_ratio", rep.bound_ratio},
          {"bound_holds", rep.bound_holds()},
          {"estimators_agree", rep.estimators_agree()}};
}

json to_json(const SuiteReport& rep) {
  // infinities (no events, no samples) are not representable in JSON
  auto real = [](double x) -> json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  return {{"trajectories", rep.trajectories},
          {"events", rep.events},
          {"identity", {{"ok", rep.identity_ok}, {"max_rel_residual", real(rep.max_identity_residual)}}},
          {"jump_sign",
           {{"ok", rep.sign_ok},
            {"min_strength", real(rep.min_strength)},
            {"max_incoming_normal", real(rep.max_incoming_normal)}}},
          {"conservation",
           {{"ok", rep.conservation_ok},
            {"max_event_energy_rel", real(rep.max_event_energy_rel)},
            {"max_event_momentum_rel", real(rep.max_event_momentum_rel)},
            {"max_energy_drift", real(rep.max_energy_drift)},
            {"max_momentum_drift", real(rep.max_momentum_drift)}}},
          {"inertia_lemma", {{"ok", rep.inertia_ok}, {"min_slack", real(rep.min_inertia_slack)}}},
          {"r_bound", {{"ok", rep.r_bound_ok}, {"min_slack", real(rep.min_r_bound_slack)}}},
          {"total_strength_bound",
           {{"ok", rep.total_bound_ok}, {"min_slack", real(rep.min_total_bound_slack)}}},
          {"optimal_lambda_bound",
           {{"ok", rep.optimal_bound_ok}, {"min_slack", real(rep.min_optimal_bound_slack)}}},
          {"all_ok", rep.all_ok()}};
}

void write_summary_csv(std::ostream& os, const std::vector<SampleOutcome>& outcomes) {
  os << "draw,events,forward_events,backward_events,total_strength,energy,I_N,lambda_star_slack\n";
  for (const auto& o : outcomes) {
    os << o.draw << ',' << (o.forward_events + o.backward_events) << ',' << o.forward_events << ','
       << o.backward_events << ',' << format_real(o.total()) << ',' << format_real(o.energy) << ','
       << format_real(o.inertia) << ',' << format_real(o.lambda_star_slack()) << '\n';
  }
}

}  // namespace hsvirial
