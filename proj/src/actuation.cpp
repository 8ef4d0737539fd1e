#include "squidsim/actuation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace squidsim {

ActuatorState make_actuators(const ActuationParams& params, double initial_fill)
{
  ActuatorState a;
  for (auto& cyl : a.ballast) {
    cyl.capacity = params.capacity;
    cyl.fill = std::clamp(initial_fill, 0.0, params.capacity);
  }
  a.ballast[0].rate = params.rate_front;
  a.ballast[1].rate = params.rate_rear;
  return a;
}

ActuatorState apply_command(const ActuatorState& actuators, const MotorCommand& cmd)
{
  if (cmd.motor_id < 1 || cmd.motor_id > kMotorCount)
    throw std::out_of_range("motor id out of range 1..6: " + std::to_string(cmd.motor_id));

  ActuatorState out = actuators;
  const double mag = std::clamp(cmd.magnitude, 0.0, 1.0);

  if (cmd.motor_id <= 4) {
    double& drive = out.pump[static_cast<std::size_t>(cmd.motor_id - 1)];
    switch (cmd.action) {
      case MotorAction::forward: drive = mag; break;
      case MotorAction::reverse: drive = -mag; break;
      case MotorAction::stop: drive = 0.0; break;
    }
    return out;
  }

  BallastCylinder& cyl = out.ballast[static_cast<std::size_t>(cmd.motor_id - 5)];
  switch (cmd.action) {
    case MotorAction::stop:
      cyl.motor = BallastMotor::stopped;
      break;
    case MotorAction::forward:
      if (cyl.limit == LimitLatch::full) break;
      if (cyl.limit == LimitLatch::empty) cyl.limit = LimitLatch::none;
      cyl.motor = BallastMotor::intake;
      cyl.speed = mag;
      break;
    case MotorAction::reverse:
      if (cyl.limit == LimitLatch::empty) break;
      if (cyl.limit == LimitLatch::full) cyl.limit = LimitLatch::none;
      cyl.motor = BallastMotor::release;
      cyl.speed = mag;
      break;
  }
  return out;
}

BallastCylinder ballast_step(const BallastCylinder& cyl, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("ballast step requires dt > 0");
  BallastCylinder out = cyl;
  const double delta = cyl.rate * cyl.speed * dt;

  if (cyl.motor == BallastMotor::intake) {
    const double next = cyl.fill + delta;
    if (next >= cyl.capacity) {
      out.intake_total += cyl.capacity - cyl.fill;
      out.fill = cyl.capacity;
      out.motor = BallastMotor::stopped;
      out.limit = LimitLatch::full;
    } else {
      out.intake_total += delta;
      out.fill = next;
    }
  } else if (cyl.motor == BallastMotor::release) {
    const double next = cyl.fill - delta;
    if (next <= 0.0) {
      out.release_total += cyl.fill;
      out.fill = 0.0;
      out.motor = BallastMotor::stopped;
      out.limit = LimitLatch::empty;
    } else {
      out.release_total += delta;
      out.fill = next;
    }
  }
  return out;
}

ActuatorState actuators_step(const ActuatorState& actuators, double dt)
{
  ActuatorState out = actuators;
  for (auto& cyl : out.ballast) cyl = ballast_step(cyl, dt);
  return out;
}

ControlInputs control_inputs(const ActuatorState& a, double neutral)
{
  ControlInputs in;
  in.w_p1 = a.pump[0];
  in.w_p2 = a.pump[1];
  in.w_sL = a.pump[2];
  in.w_sR = a.pump[3];
  in.dV1 = a.ballast[0].fill - neutral;
  in.dV2 = a.ballast[1].fill - neutral;
  return in;
}

std::string_view to_string(MotorAction a)
{
  switch (a) {
    case MotorAction::forward: return "forward";
    case MotorAction::reverse: return "reverse";
    case MotorAction::stop: return "stop";
  }
  return "?";
}

std::string_view to_string(BallastMotor m)
{
  switch (m) {
    case BallastMotor::intake: return "intake";
    case BallastMotor::release: return "release";
    case BallastMotor::stopped: return "stopped";
  }
  return "?";
}

std::string_view to_string(LimitLatch l)
{
  switch (l) {
    case LimitLatch::none: return "none";
    case LimitLatch::full: return "full";
    case LimitLatch::empty: return "empty";
  }
  return "?";
}

}  // namespace squidsim
