#include "squidsim/mission.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace squidsim {

std::string_view to_string(MissionPhase phase)
{
  switch (phase) {
    case MissionPhase::idle: return "idle";
    case MissionPhase::transit: return "transit";
    case MissionPhase::descend: return "descend";
    case MissionPhase::sampling: return "sampling";
    case MissionPhase::ascend: return "ascend";
    case MissionPhase::return_home: return "return_home";
    case MissionPhase::done: return "done";
    case MissionPhase::aborted: return "aborted";
  }
  return "?";
}

void MissionPlan::validate(double spare_capacity) const
{
  if (!(sample_depth >= 0.0)) throw std::invalid_argument("mission sample_depth must be >= 0");
  if (!(sample_volume >= 0.0)) throw std::invalid_argument("mission sample_volume must be >= 0");
  if (sample_volume > spare_capacity)
    throw std::invalid_argument("mission sample_volume exceeds spare cylinder capacity");
  if (!(capture_radius > 0.0)) throw std::invalid_argument("mission capture_radius must be > 0");
}

namespace {

MissionStatus enter(MissionStatus s, MissionPhase phase, double t)
{
  s.phase = phase;
  s.phase_start = t;
  s.in_band_since = -1.0;
  return s;
}

}  // namespace

MissionStatus mission_start(const MissionStatus& status, double t)
{
  if (status.phase != MissionPhase::idle && status.phase != MissionPhase::done &&
      status.phase != MissionPhase::aborted)
    return status;
  MissionStatus s;
  s.last_fix_time = t;
  return enter(s, MissionPhase::transit, t);
}

MissionStatus mission_abort(const MissionStatus& status, double t, std::string reason)
{
  if (status.phase == MissionPhase::idle || status.phase == MissionPhase::done ||
      status.phase == MissionPhase::aborted)
    return status;
  MissionStatus s = enter(status, MissionPhase::aborted, t);
  s.abort_reason = std::move(reason);
  return s;
}

MissionOutput mission_step(const MissionStatus& status, const MissionPlan& plan,
                           const MissionNav& nav)
{
  MissionOutput out;
  MissionStatus s = status;
  if (nav.fix) {
    s.last_fix = nav.fix;
    s.last_fix_time = nav.t;
  }

  out.active = s.phase != MissionPhase::idle;
  out.setpoints.heading = s.heading_hold;
  out.setpoints.depth = 0.0;
  out.setpoints.surge = 0.0;

  auto transit_to = [&](const GeoPoint& goal, MissionPhase next) {
    if (!nav.fix && nav.t - s.last_fix_time > plan.fix_timeout) {
      s = mission_abort(s, nav.t, "no GPS fix for " + std::to_string(plan.fix_timeout) + " s");
      return;
    }
    if (!s.last_fix) return;  // hold still until the first fix
    if (distance(*s.last_fix, goal) <= plan.capture_radius) {
      s = enter(s, next, nav.t);
      return;
    }
    if (nav.fix) s.heading_hold = bearing(*s.last_fix, goal);
    out.setpoints.heading = s.heading_hold;
    out.setpoints.surge = plan.surge;
  };

  switch (s.phase) {
    case MissionPhase::idle:
    case MissionPhase::done:
    case MissionPhase::aborted:
      break;

    case MissionPhase::transit:
      transit_to(plan.target, MissionPhase::descend);
      break;

    case MissionPhase::descend: {
      out.setpoints.depth = plan.sample_depth;
      if (std::abs(nav.depth - plan.sample_depth) <= plan.depth_tolerance) {
        if (s.in_band_since < 0.0) s.in_band_since = nav.t;
        if (nav.t - s.in_band_since >= plan.depth_hold_time) {
          const double spare = (nav.capacity[0] - nav.fill[0]) + (nav.capacity[1] - nav.fill[1]);
          if (spare < plan.sample_volume) {
            s = mission_abort(s, nav.t, "sample volume unreachable");
          } else {
            s = enter(s, MissionPhase::sampling, nav.t);
            s.fill_at_sample_start = nav.fill;
            out.directive = BallastDirective::intake_sample;
          }
        }
      } else {
        s.in_band_since = -1.0;
      }
      break;
    }

    case MissionPhase::sampling: {
      out.setpoints.depth = plan.sample_depth;
      double taken = 0.0;
      for (std::size_t i = 0; i < 2; ++i)
        taken += std::max(0.0, nav.fill[i] - s.fill_at_sample_start[i]);
      s.sampled = std::max(s.sampled, taken);
      if (s.sampled >= plan.sample_volume) {
        for (std::size_t i = 0; i < 2; ++i)
          s.sample_floor[i] = std::max(0.0, nav.fill[i] - s.fill_at_sample_start[i]);
        s = enter(s, MissionPhase::ascend, nav.t);
        out.directive = BallastDirective::retain_sample;
        out.setpoints.depth = 0.0;
      } else if (nav.fill[0] >= nav.capacity[0] && nav.fill[1] >= nav.capacity[1]) {
        s = mission_abort(s, nav.t, "sample volume unreachable");
      } else {
        out.directive = BallastDirective::intake_sample;
      }
      break;
    }

    case MissionPhase::ascend: {
      out.directive = BallastDirective::retain_sample;
      out.setpoints.depth = 0.0;
      const bool at_floor =
          nav.fill[0] <= s.sample_floor[0] + 1e-12 && nav.fill[1] <= s.sample_floor[1] + 1e-12;
      if (at_floor && nav.depth > plan.surface_depth) s.margin_exhausted = true;
      if (nav.depth <= plan.surface_depth) {
        s = enter(s, MissionPhase::return_home, nav.t);
      } else if (nav.t - s.phase_start > plan.ascent_timeout) {
        s = mission_abort(s, nav.t, "ascent stalled");
      }
      break;
    }

    case MissionPhase::return_home:
      out.directive = BallastDirective::retain_sample;
      transit_to(plan.home, MissionPhase::done);
      break;
  }

  if (s.phase == MissionPhase::done || s.phase == MissionPhase::aborted) {
    out.setpoints.surge = 0.0;
    out.setpoints.depth = 0.0;
    out.directive = s.phase == MissionPhase::done ? BallastDirective::retain_sample
                                                  : BallastDirective::depth_control;
  }
  out.status = s;
  return out;
}

MotorCommand enforce_sample_floor(const MotorCommand& cmd, const BallastCylinder& cyl,
                                  double floor, double dt)
{
  if (cmd.action != MotorAction::reverse) return cmd;
  MotorCommand out = cmd;
  const double room = cyl.fill - floor;
  if (room <= 0.0) {
    out.action = MotorAction::stop;
    out.magnitude = 0.0;
    return out;
  }
  if (cyl.rate > 0.0 && dt > 0.0) out.magnitude = std::min(out.magnitude, room / (cyl.rate * dt));
  return out;
}

}  // namespace squidsim
