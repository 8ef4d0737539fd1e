#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "squidsim/control.hpp"
#include "squidsim/geo.hpp"

namespace squidsim {

enum class MissionPhase { idle, transit, descend, sampling, ascend, return_home, done, aborted };

std::string_view to_string(MissionPhase phase);

struct MissionPlan {
  GeoPoint target;
  GeoPoint home;
  double sample_depth = 0.13;      // m
  double sample_volume = 2e-5;     // m^3
  double capture_radius = 2.0;     // m
  double surge = 1.0;              // propulsion drive during transits
  double depth_tolerance = 0.03;   // m
  double depth_hold_time = 2.0;    // s within tolerance before sampling
  double surface_depth = 0.03;     // ascent complete at or above this depth, m
  double fix_timeout = 30.0;       // s without a GPS fix while transiting
  double ascent_timeout = 120.0;   // s

  /// Throws std::invalid_argument if the plan cannot be flown with
  /// `spare_capacity` m^3 of intake room.
  void validate(double spare_capacity) const;
};

struct MissionStatus {
  MissionPhase phase = MissionPhase::idle;
  double sampled = 0.0;       // m^3
  double phase_start = 0.0;   // s
  std::optional<GeoPoint> last_fix;
  double last_fix_time = 0.0;
  double heading_hold = 0.0;  // last commanded bearing, deg
  double in_band_since = -1.0;
  std::array<double, 2> fill_at_sample_start{};
  std::array<double, 2> sample_floor{};  // per-cylinder volume that must stay aboard
  bool margin_exhausted = false;
  std::string abort_reason;
};

// What the vehicle knows at a control tick.
struct MissionNav {
  double t = 0.0;
  std::optional<GeoPoint> fix;  // only set on a fresh fix
  double depth = 0.0;           // estimated, m
  std::array<double, 2> fill{};
  std::array<double, 2> capacity{};
};

enum class BallastDirective {
  depth_control,  // ballast follows the depth/pitch loops
  intake_sample,  // both cylinders intake, volume credited as sample
  retain_sample,  // depth/pitch loops, but no cylinder drops below its floor
};

struct MissionOutput {
  Setpoints setpoints;
  bool active = false;  // false: mission issues no setpoints
  BallastDirective directive = BallastDirective::depth_control;
  MissionStatus status;
};

MissionStatus mission_start(const MissionStatus& status, double t);
MissionStatus mission_abort(const MissionStatus& status, double t, std::string reason);

/// Advances the sampling mission by one control tick.
MissionOutput mission_step(const MissionStatus& status, const MissionPlan& plan,
                           const MissionNav& nav);

/// Limits a release command so the cylinder cannot drop below `floor`
/// within the next `dt` seconds; at the floor it becomes a stop.
MotorCommand enforce_sample_floor(const MotorCommand& cmd, const BallastCylinder& cyl,
                                  double floor, double dt);

}  // namespace squidsim
