#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "squidsim/link.hpp"
#include "squidsim/mission.hpp"
#include "squidsim/params.hpp"
#include "squidsim/protocol.hpp"
#include "squidsim/scenario.hpp"

namespace squidsim {

// One control-period sample of everything the simulator knows.
struct LogRow {
  double t = 0.0;
  VehicleState truth;
  IMUSample imu;
  PressureReading pressure;
  std::optional<GeoPoint> gps;
  ActuatorState actuators;
  bool heading_hold = false;
  bool depth_hold = false;
  Setpoints setpoints;
  double steer_cmd = 0.0;
  double total_target = 0.0;  // m^3
  double diff_target = 0.0;   // m^3
  MissionPhase phase = MissionPhase::idle;
  double sampled = 0.0;
  bool tlm_emitted = false;
  LinkReport link;
  std::string payload;
};

struct RunLog {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<LogRow> rows;
  MissionStatus mission;

  /// Numeric column by CSV name; throws std::out_of_range if unknown.
  std::vector<double> column(std::string_view name) const;
  std::vector<double> times() const;
};

/// CSV header, in fixed order.
const std::vector<std::string>& csv_columns();
void write_csv(const RunLog& log, std::ostream& out);
std::string to_csv(const RunLog& log);

// Single-owner simulation loop. Commands are queued and applied at the
// start of the next control tick.
class Simulator {
 public:
  Simulator(SimConfig config, std::uint64_t seed, const VehicleState& initial = {},
            double initial_fill_offset = 0.0);

  void set_mission_plan(const MissionPlan& plan);
  void enqueue(const Command& cmd);

  /// Runs one control period and returns the sample taken at its start.
  LogRow tick();

  double time() const { return state_.t; }
  std::uint64_t ticks() const { return tick_; }
  const VehicleState& state() const { return state_; }
  const ActuatorState& actuators() const { return actuators_; }
  const MissionStatus& mission() const { return mission_; }
  const SimConfig& config() const { return config_; }
  double neutral() const { return neutral_; }

 private:
  void apply(const Command& cmd);

  SimConfig config_;
  double neutral_ = 0.0;
  std::uint64_t substeps_ = 1;
  std::uint64_t gps_ticks_ = 1;
  std::uint64_t tlm_ticks_ = 1;

  VehicleState state_;
  VehicleState prev_state_;
  ActuatorState actuators_;
  DeadReckonState dead_reckon_;
  std::optional<GeoPoint> last_fix_;

  bool heading_hold_ = false;
  bool depth_hold_ = false;
  Setpoints setpoints_;
  PidState heading_pid_;
  PidState depth_pid_;
  PidState pitch_pid_;

  std::optional<MissionPlan> plan_;
  MissionStatus mission_;

  std::deque<Command> queue_;
  std::uint64_t tick_ = 0;

  Rng imu_rng_;
  Rng gps_rng_;
  Rng pressure_rng_;
  Rng link_rng_;
  Rng disturbance_rng_;
};

/// Runs a scenario to completion. Config errors surface before t = 0.
RunLog run_scenario(const Scenario& scenario, const SimConfig& base = {});

}  // namespace squidsim
