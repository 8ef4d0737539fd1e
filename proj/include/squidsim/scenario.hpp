#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "squidsim/mission.hpp"
#include "squidsim/params.hpp"

namespace squidsim {

// A command in the comms grammar injected at sim time `t`.
struct ScenarioEvent {
  double t = 0.0;
  std::string command;
};

// Heading setpoint swept linearly between two values over [t_start, t_end].
struct HeadingRamp {
  double t_start = 0.0;
  double t_end = 0.0;
  double from = 0.0;
  double to = 0.0;
};

// Line-oriented scenario description:
//
//   name = heading_step
//   duration = 40
//   physics_dt = 0.01          # optional, overrides sim.physics_dt
//   control_dt = 0.02          # optional, overrides control.dt
//   seed = 7
//   initial.heading = 90       # any VehicleState field
//   initial.fill_offset = 0    # per-cylinder offset from neutral fill, m^3
//   param.<key> = <value>      # parameter-file override
//   event <t> <command>        # e.g. `event 20 HDG:180`
//   ramp heading <t0> <t1> <from> <to>
//   mission.target_ne = <north>, <east>   or   mission.target = <lat>, <lon>
//   mission.home_ne / mission.home, mission.<MissionPlan field> = <value>
struct Scenario {
  std::string name = "scenario";
  double duration = 10.0;
  std::optional<double> physics_dt;
  std::optional<double> control_dt;
  std::uint64_t seed = 1;
  VehicleState initial;
  double initial_fill_offset = 0.0;
  std::vector<std::string> overrides;  // key=value
  std::vector<ScenarioEvent> events;
  std::vector<HeadingRamp> ramps;
  std::optional<MissionPlan> mission;

  /// Base config with this scenario's overrides and step sizes applied,
  /// validated. Throws ConfigError.
  SimConfig resolve(const SimConfig& base) const;

  /// Throws ConfigError on an inconsistent scenario.
  void validate(const SimConfig& resolved) const;
};

class ScenarioError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

Scenario parse_scenario(std::string_view text, const GeoRef& ref = {});
Scenario load_scenario(const std::filesystem::path& path, const GeoRef& ref = {});

}  // namespace squidsim
