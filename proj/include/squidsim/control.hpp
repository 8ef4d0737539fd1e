#pragma once

#include <optional>
#include <utility>

#include "squidsim/actuation.hpp"

namespace squidsim {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double i_limit = 1.0;    // bound on |ki * integral|
  double out_limit = 1.0;  // bound on |output|
  double d_tau = 0.2;      // low-pass on the differenced measurement, s

  void validate() const;
};

struct PidState {
  double integral = 0.0;
  double prev_meas = 0.0;
  double rate = 0.0;  // filtered d(meas)/dt
  bool primed = false;
};

// PID with derivative on measurement and a clamped integral term. The
// derivative uses `meas_rate` when the caller has a rate sensor, otherwise
// a filtered difference of successive measurements.
struct PidResult {
  double output = 0.0;
  PidState state;
};

PidResult pid_update(const PidGains& gains, const PidState& state, double error, double meas,
                     std::optional<double> meas_rate, double dt);

struct ControlParams {
  double dt = 0.02;  // control loop period, s
  PidGains heading{0.05, 0.0, 0.01, 0.2, 1.0, 0.2};
  PidGains depth{1.6e-4, 0.0, 4e-4, 2e-5, 1.8e-4, 0.3};
  PidGains pitch{2e-6, 0.0, 1e-6, 1e-5, 3e-5, 0.2};
  double servo_tau = 0.5;      // ballast volume servo time constant, s
  double deadband = 1e-6;      // m^3/s
  double surface_trim = -1e-5; // total offset held while surfaced, m^3
};

struct Setpoints {
  double heading = 0.0;  // deg
  double depth = 0.0;    // m
  double pitch = 0.0;    // deg
  double surge = 0.0;    // drive [-1, 1]
};

struct SteeringDrive {
  double w_sL = 0.0;
  double w_sR = 0.0;
};

/// Positive differential turns to starboard (heading increases).
SteeringDrive steering_from_differential(double differential);

struct HeadingOutput {
  double differential = 0.0;  // [-1, 1]
  PidState state;
};

/// Heading PID on the shortest arc. `yaw_rate` is the gyro rate in deg/s.
HeadingOutput heading_control(const PidGains& gains, double setpoint, double meas,
                              std::optional<double> yaw_rate, double dt, const PidState& state);

// Volume-offset demand from the outer loop and the rate that drives the
// current offset toward it.
struct BallastDemand {
  double target = 0.0;  // m^3
  double rate = 0.0;    // m^3/s
  PidState state;
};

/// Depth PID producing a total ballast offset demand (positive = intake).
/// `current_total` is the present sum of both cylinder offsets.
BallastDemand depth_control(const PidGains& gains, double setpoint, double meas,
                            double current_total, double servo_tau, double dt,
                            const PidState& state);

/// Pitch PID producing a differential ballast demand dV1 - dV2.
BallastDemand pitch_control(const PidGains& gains, double setpoint, double meas,
                            std::optional<double> pitch_rate, double current_diff,
                            double servo_tau, double dt, const PidState& state);

/// Splits total and differential rate demands (m^3/s) across the front and
/// rear cylinders. A cylinder blocked by a latched limit sheds the total
/// component of its demand to the other cylinder; the differential
/// component is never shed.
std::pair<MotorCommand, MotorCommand> allocate(double total_rate, double diff_rate,
                                               const BallastCylinder& front,
                                               const BallastCylinder& rear, double deadband);

}  // namespace squidsim
