#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "squidsim/dynamics.hpp"

namespace squidsim {

enum class MotorAction { forward, reverse, stop };

// 1 front propulsion, 2 rear propulsion, 3 left steering, 4 right steering,
// 5 front ballast, 6 rear ballast.
inline constexpr int kMotorCount = 6;

struct MotorCommand {
  int motor_id = 1;
  MotorAction action = MotorAction::stop;
  double magnitude = 1.0;  // [0, 1]

  bool operator==(const MotorCommand&) const = default;
};

enum class BallastMotor { intake, release, stopped };
enum class LimitLatch { none, full, empty };

struct BallastCylinder {
  double capacity = 1.5e-4;  // m^3
  double fill = 0.0;         // m^3
  double rate = 2e-5;        // m^3/s at full speed
  double speed = 1.0;        // [0, 1] fraction of rate while running
  BallastMotor motor = BallastMotor::stopped;
  LimitLatch limit = LimitLatch::none;

  // Cumulative volume moved, for bookkeeping checks.
  double intake_total = 0.0;
  double release_total = 0.0;

  bool operator==(const BallastCylinder&) const = default;
};

struct ActuationParams {
  double capacity = 1.5e-4;
  double rate_front = 2e-5;
  double rate_rear = 2e-5;
};

struct ActuatorState {
  // Pump drives in [-1, 1], ordered by motor id 1..4.
  std::array<double, 4> pump{};
  // Ballast cylinders, motor ids 5 (front) and 6 (rear).
  std::array<BallastCylinder, 2> ballast{};

  bool operator==(const ActuatorState&) const = default;
};

/// Both cylinders at `initial_fill`, all motors stopped.
ActuatorState make_actuators(const ActuationParams& params, double initial_fill);

/// Applies one motor command. Throws std::out_of_range for an id outside
/// 1..6 (the input state is untouched). A command that drives further into
/// a latched limit is ignored; the opposite direction clears the latch.
ActuatorState apply_command(const ActuatorState& actuators, const MotorCommand& cmd);

/// Advances a cylinder's fill. Reaching either travel end clamps the fill
/// exactly to the bound, stops the motor and latches the limit within the
/// same step.
BallastCylinder ballast_step(const BallastCylinder& cyl, double dt);

ActuatorState actuators_step(const ActuatorState& actuators, double dt);

/// Maps actuator state to model inputs; ballast offsets are measured from
/// `neutral`.
ControlInputs control_inputs(const ActuatorState& actuators, double neutral);

std::string_view to_string(MotorAction a);
std::string_view to_string(BallastMotor m);
std::string_view to_string(LimitLatch l);

}  // namespace squidsim
