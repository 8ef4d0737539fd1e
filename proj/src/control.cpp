#include "squidsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "squidsim/angles.hpp"

namespace squidsim {

void PidGains::validate() const
{
  if (kp < 0.0 || ki < 0.0 || kd < 0.0) throw std::invalid_argument("PID gains must be >= 0");
  if (!(i_limit > 0.0) || !(out_limit > 0.0))
    throw std::invalid_argument("PID limits must be > 0");
  if (d_tau < 0.0) throw std::invalid_argument("PID derivative filter must be >= 0");
}

PidResult pid_update(const PidGains& g, const PidState& s, double error, double meas,
                     std::optional<double> meas_rate, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("controller requires dt > 0");
  PidResult res;
  PidState& n = res.state;
  n = s;

  if (meas_rate) {
    n.rate = *meas_rate;
  } else if (s.primed) {
    const double raw = (meas - s.prev_meas) / dt;
    n.rate = s.rate + (raw - s.rate) * dt / (g.d_tau + dt);
  } else {
    n.rate = 0.0;
  }
  n.prev_meas = meas;
  n.primed = true;

  if (g.ki > 0.0) {
    const double bound = g.i_limit / g.ki;
    n.integral = std::clamp(s.integral + error * dt, -bound, bound);
  }

  const double out = g.kp * error + g.ki * n.integral - g.kd * n.rate;
  res.output = std::clamp(out, -g.out_limit, g.out_limit);
  return res;
}

SteeringDrive steering_from_differential(double differential)
{
  const double d = std::clamp(differential, -1.0, 1.0);
  return {-d, d};
}

HeadingOutput heading_control(const PidGains& gains, double setpoint, double meas,
                              std::optional<double> yaw_rate, double dt, const PidState& state)
{
  const double error = shortest_arc(setpoint, meas);
  // Differencing a wrapped heading would jump at north; keep the filter on
  // an unwrapped copy.
  double unwrapped = meas;
  if (state.primed) unwrapped = state.prev_meas + shortest_arc(meas, state.prev_meas);
  const PidResult r = pid_update(gains, state, error, unwrapped, yaw_rate, dt);
  HeadingOutput out;
  out.differential = std::clamp(r.output, -1.0, 1.0);
  out.state = r.state;
  return out;
}

namespace {

BallastDemand servo(double target, double current, double servo_tau, const PidState& state)
{
  BallastDemand d;
  d.target = target;
  d.rate = (target - current) / std::max(servo_tau, 1e-9);
  d.state = state;
  return d;
}

}  // namespace

BallastDemand depth_control(const PidGains& gains, double setpoint, double meas,
                            double current_total, double servo_tau, double dt,
                            const PidState& state)
{
  const PidResult r = pid_update(gains, state, setpoint - meas, meas, std::nullopt, dt);
  return servo(r.output, current_total, servo_tau, r.state);
}

BallastDemand pitch_control(const PidGains& gains, double setpoint, double meas,
                            std::optional<double> pitch_rate, double current_diff,
                            double servo_tau, double dt, const PidState& state)
{
  const PidResult r = pid_update(gains, state, setpoint - meas, meas, pitch_rate, dt);
  return servo(r.output, current_diff, servo_tau, r.state);
}

namespace {

bool blocked(const BallastCylinder& c, double rate)
{
  if (rate > 0.0) return c.limit == LimitLatch::full || c.fill >= c.capacity;
  if (rate < 0.0) return c.limit == LimitLatch::empty || c.fill <= 0.0;
  return false;
}

MotorCommand to_command(int id, double rate, const BallastCylinder& c, double deadband)
{
  MotorCommand cmd;
  cmd.motor_id = id;
  if (std::abs(rate) < deadband || blocked(c, rate)) {
    cmd.action = MotorAction::stop;
    cmd.magnitude = 0.0;
    return cmd;
  }
  cmd.action = rate > 0.0 ? MotorAction::forward : MotorAction::reverse;
  cmd.magnitude = c.rate > 0.0 ? std::min(1.0, std::abs(rate) / c.rate) : 1.0;
  return cmd;
}

}  // namespace

std::pair<MotorCommand, MotorCommand> allocate(double total_rate, double diff_rate,
                                               const BallastCylinder& front,
                                               const BallastCylinder& rear, double deadband)
{
  const double half_total = 0.5 * total_rate;
  const double half_diff = 0.5 * diff_rate;
  double r1 = half_total + half_diff;
  double r2 = half_total - half_diff;

  const bool b1 = blocked(front, r1);
  const bool b2 = blocked(rear, r2);
  if (b1 && !b2 && half_total * r1 > 0.0) r2 += half_total;
  if (b2 && !b1 && half_total * r2 > 0.0) r1 += half_total;

  return {to_command(5, r1, front, deadband), to_command(6, r2, rear, deadband)};
}

}  // namespace squidsim
